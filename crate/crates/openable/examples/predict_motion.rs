//! Predict motion type, axis, and hinge origin for every openable part of the
//! built-in furniture suite, and report accuracy against the known answers.
//!
//! Run with: `cargo run --example predict_motion`

use openable::assets::MotionType;
use openable::fixtures::fixture_suite;
use openable::motion::{predict_motion, MotionTypeStats};

fn main() -> openable::Result<()> {
    let stats = MotionTypeStats::default();
    let mut parts = 0usize;
    let mut type_ok = 0usize;
    let mut axis_ok = 0usize;

    for fixture in fixture_suite() {
        let predicted = predict_motion(&fixture.seg, &fixture.mesh, &fixture.frame, &stats)?;
        for (pred, truth) in predicted.parts.iter().zip(&fixture.seg.parts) {
            let (Some(p), Some(t)) = (&pred.motion, &truth.motion) else {
                continue;
            };
            parts += 1;
            if p.motion_type == t.motion_type {
                type_ok += 1;
            }
            let angle = p.axis.normalize().dot(&t.axis.normalize()).abs().acos();
            if angle.to_degrees() < 1.0 {
                axis_ok += 1;
            }
            if p.motion_type == MotionType::Revolute {
                println!(
                    "{} {}: revolute about ({:+.2}, {:+.2}, {:+.2}) at ({:.2}, {:.2}, {:.2})",
                    fixture.name,
                    pred.id,
                    p.axis.x,
                    p.axis.y,
                    p.axis.z,
                    p.origin.unwrap().x,
                    p.origin.unwrap().y,
                    p.origin.unwrap().z,
                );
            }
        }
    }
    println!("motion type: {type_ok}/{parts} correct");
    println!("axis within 1 degree: {axis_ok}/{parts}");
    Ok(())
}
