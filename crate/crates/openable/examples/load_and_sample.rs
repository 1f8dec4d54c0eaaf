//! Load a mesh, sample a labeled surface point cloud, downsample it with
//! farthest point sampling, and write the result as a binary PLY.
//!
//! Run with: `cargo run --example load_and_sample`

use openable::fixtures::dresser;
use openable::sampling::{farthest_point_sample, sample_surface};

fn main() -> openable::Result<()> {
    let fixture = dresser(3, 1.0, 0.6, 1.1);
    println!(
        "{}: {} vertices, {} triangles, {} parts",
        fixture.name,
        fixture.mesh.vertices.len(),
        fixture.mesh.triangles.len(),
        fixture.seg.parts.len()
    );

    // Dense area-weighted surface samples, plus every mesh vertex so no
    // triangle is missed.
    let mut cloud = sample_surface(&fixture.mesh, 100_000, true, 7)?;
    cloud.label_from_segmentation(&fixture.seg, fixture.mesh.triangles.len());
    println!("sampled {} points", cloud.len());

    // Farthest point sampling keeps a well-spread subset.
    let keep = farthest_point_sample(&cloud.positions, 2_000)?;
    let sparse = cloud.select(&keep);
    println!("downsampled to {} points", sparse.len());

    let out = std::env::temp_dir().join("openable_sample.ply");
    openable::sampling::save_cloud_ply(&out, &sparse)?;
    println!("wrote {}", out.display());

    let back = openable::sampling::load_cloud_ply(&out)?;
    assert_eq!(back.len(), sparse.len());
    println!("round-tripped {} points", back.len());
    Ok(())
}
