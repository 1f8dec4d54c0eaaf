//! Export an annotated cabinet as a URDF articulated object and read the
//! joints back to verify the round trip.
//!
//! Run with: `cargo run --example export_urdf`

use openable::assets::{
    export_urdf, import_urdf_joints, ArticulatedObject, ArticulatedPart,
};
use openable::fixtures::{chest, door_cabinet, HandleSide};

fn main() -> openable::Result<()> {
    for fixture in [door_cabinet(HandleSide::Left, 0.8, 0.6, 1.0), chest(true, 0.9, 0.6, 0.5)] {
        let mesh = &fixture.mesh;
        let obj = ArticulatedObject {
            base: mesh.submesh(fixture.seg.base_triangles.iter().copied()),
            parts: fixture
                .seg
                .parts
                .iter()
                .map(|p| ArticulatedPart {
                    mesh: mesh.submesh(p.triangle_ids.iter().copied()),
                    label: p.label,
                    motion: p.motion.clone().expect("fixture parts carry motion"),
                })
                .collect(),
            frame: fixture.frame,
        };

        let out_dir = std::env::temp_dir().join("openable_urdf").join(&fixture.name);
        let files = export_urdf(&obj, &out_dir)?;
        println!("{}:", fixture.name);
        for f in &files {
            println!("  {}", f.display());
        }

        let urdf = files
            .iter()
            .find(|f| f.extension().and_then(|e| e.to_str()) == Some("urdf"))
            .expect("export always writes a .urdf");
        let joints = import_urdf_joints(urdf)?;
        for j in &joints {
            println!(
                "  joint {}: {} about ({:+.2}, {:+.2}, {:+.2})",
                j.name, j.joint_type, j.axis.x, j.axis.y, j.axis.z
            );
        }
        assert_eq!(joints.len(), obj.parts.len());
    }
    Ok(())
}
