//! Synthesize a closed drawer body behind each drawer front by ray probing
//! the cavity, then export the articulated object as URDF.
//!
//! Run with: `cargo run --example complete_interior`

use openable::assets::{ArticulatedObject, ArticulatedPart};
use openable::fixtures::dresser;
use openable::interior::complete_interiors;

fn main() -> openable::Result<()> {
    let fixture = dresser(2, 1.0, 0.6, 1.1);
    let mesh = &fixture.mesh;

    let parts = fixture
        .seg
        .parts
        .iter()
        .map(|p| ArticulatedPart {
            mesh: mesh.submesh(p.triangle_ids.iter().copied()),
            label: p.label,
            motion: p.motion.clone().expect("fixture parts carry motion"),
        })
        .collect();
    let obj = ArticulatedObject {
        base: mesh.submesh(fixture.seg.base_triangles.iter().copied()),
        parts,
        frame: fixture.frame,
    };

    let completed = complete_interiors(&obj)?;
    for (before, after) in obj.parts.iter().zip(&completed.parts) {
        println!(
            "{:?}: {} -> {} triangles",
            before.label,
            before.mesh.triangles.len(),
            after.mesh.triangles.len()
        );
    }

    let out_dir = std::env::temp_dir().join("openable_completed");
    let files = openable::assets::export_urdf(&completed, &out_dir)?;
    println!("exported {} files to {}", files.len(), out_dir.display());
    Ok(())
}
