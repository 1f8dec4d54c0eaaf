//! Fit gravity-aligned oriented bounding boxes to each part of a cabinet and
//! compare part boxes with 3D generalized IoU.
//!
//! Run with: `cargo run --example fit_boxes`

use openable::fixtures::{door_cabinet, HandleSide};
use openable::geometry::{giou3d, gravity_obb, Aabb};

fn main() -> openable::Result<()> {
    let fixture = door_cabinet(HandleSide::Right, 0.8, 0.6, 1.0);

    for part in &fixture.seg.parts {
        let sub = fixture.mesh.submesh(part.triangle_ids.iter().copied());
        let obb = gravity_obb(&sub.vertices, &fixture.frame)?;
        println!(
            "{} ({:?}): center ({:.3}, {:.3}, {:.3}), extents {:.3} x {:.3} x {:.3}",
            part.id,
            part.label,
            obb.center.x,
            obb.center.y,
            obb.center.z,
            2.0 * obb.half_extents.x,
            2.0 * obb.half_extents.y,
            2.0 * obb.half_extents.z,
        );
    }

    // GIoU on axis-aligned boxes: 1 for identical boxes, decreasing toward -1
    // as the boxes separate.
    let whole = fixture.mesh.aabb();
    let shifted = Aabb::new(
        whole.min + nalgebra::Vector3::new(0.5, 0.0, 0.0),
        whole.max + nalgebra::Vector3::new(0.5, 0.0, 0.0),
    );
    println!("giou(self, self)    = {:.4}", giou3d(&whole, &whole)?);
    println!("giou(self, shifted) = {:.4}", giou3d(&whole, &shifted)?);
    Ok(())
}
