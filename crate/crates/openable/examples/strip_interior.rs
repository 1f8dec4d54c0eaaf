//! Remove mesh segments that cannot be seen from any outside viewpoint, the
//! way a surface scan would miss them.
//!
//! Run with: `cargo run --example strip_interior`

use openable::fixtures::{box_mesh, door_cabinet, HandleSide};
use openable::geometry::{Pt3, Vec3};
use openable::interior::strip_interior;

fn main() -> openable::Result<()> {
    // A sealed crate with a loose box inside: the inner box is invisible
    // from every outside viewpoint.
    let mut crate_mesh = box_mesh(Pt3::new(0.0, 0.0, 0.5), Vec3::new(0.5, 0.5, 0.5));
    let hidden = box_mesh(Pt3::new(0.1, 0.0, 0.4), Vec3::new(0.1, 0.1, 0.1));
    let offset = crate_mesh.vertices.len() as u32;
    crate_mesh.vertices.extend(hidden.vertices.iter().copied());
    crate_mesh
        .triangles
        .extend(hidden.triangles.iter().map(|t| t.map(|i| i + offset)));
    println!("sealed crate: {} triangles", crate_mesh.triangles.len());

    let stripped = strip_interior(&crate_mesh, 64, (512, 512))?;
    println!("stripped: {} triangles", stripped.triangles.len());
    assert_eq!(stripped.triangles.len(), 12, "only the outer shell survives");

    // Stripping is idempotent: a second pass removes nothing.
    let again = strip_interior(&stripped, 64, (512, 512))?;
    assert_eq!(again.triangles.len(), stripped.triangles.len());
    println!("second pass removed nothing, as expected");

    // A cabinet is open around its door margins, so every segment stays
    // visible and the mesh passes through unchanged.
    let cabinet = door_cabinet(HandleSide::Right, 0.8, 0.6, 1.0).mesh;
    let same = strip_interior(&cabinet, 64, (512, 512))?;
    println!(
        "cabinet: {} -> {} triangles",
        cabinet.triangles.len(),
        same.triangles.len()
    );
    Ok(())
}
