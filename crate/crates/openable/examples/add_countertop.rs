//! Detect a missing countertop (mostly-open top surface) and add a flush
//! slab, leaving already-covered objects untouched.
//!
//! Run with: `cargo run --example add_countertop`

use openable::fixtures::{box_mesh, dresser};
use openable::geometry::{Frame, Pt3, Vec3};
use openable::interior::{add_countertop, top_coverage};

/// A floor and four walls with nothing on top.
fn open_top_carcass(w: f64, d: f64, h: f64) -> openable::geometry::TriMesh {
    let t = 0.02;
    let panels = [
        (Pt3::new(0.0, 0.0, t / 2.0), Vec3::new(w / 2.0, d / 2.0, t / 2.0)),
        (Pt3::new(-w / 2.0 + t / 2.0, 0.0, h / 2.0), Vec3::new(t / 2.0, d / 2.0, h / 2.0)),
        (Pt3::new(w / 2.0 - t / 2.0, 0.0, h / 2.0), Vec3::new(t / 2.0, d / 2.0, h / 2.0)),
        (Pt3::new(0.0, -d / 2.0 + t / 2.0, h / 2.0), Vec3::new(w / 2.0, t / 2.0, h / 2.0)),
        (Pt3::new(0.0, d / 2.0 - t / 2.0, h / 2.0), Vec3::new(w / 2.0, t / 2.0, h / 2.0)),
    ];
    let mut mesh = openable::geometry::TriMesh::default();
    for (center, half) in panels {
        let part = box_mesh(center, half);
        let offset = mesh.vertices.len() as u32;
        mesh.vertices.extend(part.vertices.iter().copied());
        mesh.triangles
            .extend(part.triangles.iter().map(|tri| tri.map(|i| i + offset)));
    }
    mesh
}

fn main() -> openable::Result<()> {
    let frame = Frame::canonical();

    // An open-top carcass: downward rays mostly miss the top band.
    let open = open_top_carcass(0.9, 0.6, 0.8);
    println!("open carcass top coverage: {:.2}", top_coverage(&open, &frame)?);
    let fixed = add_countertop(&open, &frame)?;
    println!(
        "after: coverage {:.2}, {} -> {} triangles",
        top_coverage(&fixed, &frame)?,
        open.triangles.len(),
        fixed.triangles.len()
    );

    // A dresser already has a top panel; nothing is added.
    let closed = dresser(2, 1.0, 0.6, 1.1).mesh;
    let same = add_countertop(&closed, &frame)?;
    assert_eq!(same.triangles.len(), closed.triangles.len());
    println!(
        "dresser coverage {:.2}: left unchanged",
        top_coverage(&closed, &frame)?
    );
    Ok(())
}
