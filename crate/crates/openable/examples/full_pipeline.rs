//! Run the batch pipeline end to end: write a directory of meshes with
//! annotation sidecars, then segment, predict motion, complete drawer
//! interiors, and export URDF for every object.
//!
//! Run with: `cargo run --example full_pipeline`

use openable::assets::{save_annotation, save_mesh};
use openable::config::PipelineConfig;
use openable::fixtures::{chest, door_cabinet, dresser, HandleSide};
use openable::pipeline::{run_pipeline, SegSource};

fn main() -> openable::Result<()> {
    let root = std::env::temp_dir().join("openable_pipeline");
    let mesh_dir = root.join("meshes");
    let out_dir = root.join("out");
    std::fs::create_dir_all(&mesh_dir)?;

    for fx in [
        dresser(3, 1.0, 0.6, 1.1),
        door_cabinet(HandleSide::Top, 0.8, 0.6, 1.0),
        chest(true, 0.9, 0.6, 0.5),
    ] {
        save_mesh(&mesh_dir.join(format!("{}.obj", fx.name)), &fx.mesh)?;
        save_annotation(&mesh_dir.join(format!("{}.json", fx.name)), &fx.seg, &fx.frame)?;
    }

    let manifest = run_pipeline(&mesh_dir, SegSource::Gt, &out_dir, &PipelineConfig::default())?;
    println!("{} succeeded, {} failed", manifest.succeeded, manifest.failed);
    for obj in &manifest.objects {
        println!("  {} -> {} files", obj.name, obj.outputs.len());
    }
    println!("outputs under {}", out_dir.display());
    Ok(())
}
