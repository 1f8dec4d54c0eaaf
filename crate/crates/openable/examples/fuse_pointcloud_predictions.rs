//! Fuse point-cloud instance predictions into a per-triangle part
//! segmentation: sample the surface, take per-point instance assignments
//! (synthesized here from the ground truth), and vote per triangle.
//!
//! Run with: `cargo run --example fuse_pointcloud_predictions`

use openable::assets::PointCloudInstance;
use openable::fixtures::{double_door_cabinet};
use openable::fusion::reconcile_pc_masks;
use openable::sampling::sample_surface;

fn main() -> openable::Result<()> {
    let fixture = double_door_cabinet(1.6, 0.5, 1.2);
    let cloud = sample_surface(&fixture.mesh, 200_000, true, 11)?;
    println!("sampled {} points", cloud.len());

    // One instance per ground-truth part: the sample points whose source
    // triangle belongs to it.
    let instances: Vec<PointCloudInstance> = fixture
        .seg
        .parts
        .iter()
        .map(|part| PointCloudInstance {
            label: part.label,
            confidence: 0.9,
            point_ids: (0..cloud.len())
                .filter(|&i| part.triangle_ids.contains(&cloud.source_triangle[i]))
                .collect(),
        })
        .collect();
    println!("built {} point-cloud instances", instances.len());

    let fused = reconcile_pc_masks(&instances, &cloud, &fixture.mesh)?;
    println!("reconciled into {} parts", fused.parts.len());
    for (got, want) in fused.parts.iter().zip(&fixture.seg.parts) {
        let inter = got.triangle_ids.intersection(&want.triangle_ids).count();
        let union = got.triangle_ids.union(&want.triangle_ids).count();
        println!(
            "  {} ({:?}): {} triangles, IoU vs annotation {:.3}",
            got.id,
            got.label,
            got.triangle_ids.len(),
            inter as f64 / union as f64
        );
    }
    Ok(())
}
