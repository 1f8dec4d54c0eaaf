//! Fuse per-view 2D instance masks into a per-triangle part segmentation.
//!
//! The "predictions" here are synthesized by rendering the ground-truth
//! segmentation from the default camera rig, so the fused result can be
//! checked against the annotation it came from.
//!
//! Run with: `cargo run --example fuse_view_predictions`

use openable::assets::{ViewMaskRecord, ViewPrediction};
use openable::fixtures::dresser;
use openable::fusion::{
    default_camera_rig, lift_view_masks, reconcile_view_masks, render_index_maps, BACKGROUND,
    CONFIDENCE_THRESHOLD,
};

fn main() -> openable::Result<()> {
    let fixture = dresser(3, 1.0, 0.6, 1.1);
    let (w, h) = (256, 256);

    let cameras = default_camera_rig(&fixture.mesh.aabb(), &fixture.frame);
    let maps = render_index_maps(&fixture.mesh, &cameras, w, h)?;
    println!("rendered {} index maps at {w}x{h}", maps.len());

    // One mask per part per view: the pixels whose visible triangle belongs
    // to that part.
    let mut masks = Vec::new();
    for (vi, map) in maps.iter().enumerate() {
        let mut records = Vec::new();
        for part in &fixture.seg.parts {
            let bitmap: Vec<bool> = map
                .pixels
                .iter()
                .map(|&t| t != BACKGROUND && part.triangle_ids.contains(&(t as usize)))
                .collect();
            if bitmap.iter().any(|&b| b) {
                records.push(ViewMaskRecord {
                    label: part.label,
                    confidence: 0.95,
                    pixels: ViewMaskRecord::encode(&bitmap),
                    width: w,
                    height: h,
                });
            }
        }
        let pred = ViewPrediction {
            view_id: format!("view_{vi}"),
            masks: records,
        };
        masks.extend(lift_view_masks(map, &pred, CONFIDENCE_THRESHOLD)?);
    }
    println!("lifted {} masks onto the mesh", masks.len());

    let fused = reconcile_view_masks(&masks, &fixture.mesh)?;
    println!(
        "reconciled into {} parts (ground truth has {})",
        fused.parts.len(),
        fixture.seg.parts.len()
    );
    for part in &fused.parts {
        println!(
            "  {} ({:?}): {} triangles, confidence {:.2}",
            part.id,
            part.label,
            part.triangle_ids.len(),
            part.confidence
        );
    }
    Ok(())
}
