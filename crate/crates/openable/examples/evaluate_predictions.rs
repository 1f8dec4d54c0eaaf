//! Score predicted part segmentations and motions against ground truth:
//! detection P/R/F1, motion accuracy (+M/+MA/+MAO), labeling accuracy,
//! clustering agreement (ARI), and the optimal-transport correction cost.
//!
//! Run with: `cargo run --example evaluate_predictions`

use openable::fixtures::{chest, fixture_suite};
use openable::metrics::{evaluate, render_table, EvalObject, MetricConfig};
use openable::motion::{predict_motion, MotionTypeStats};

fn main() -> openable::Result<()> {
    // Predictions here come from the motion heuristic run on the ground-truth
    // segmentation, so segmentation scores are perfect and motion scores
    // measure the heuristic alone.
    let stats = MotionTypeStats::default();
    let objects: Vec<EvalObject> = fixture_suite()
        .into_iter()
        .map(|fx| {
            let pred = predict_motion(&fx.seg, &fx.mesh, &fx.frame, &stats)?;
            Ok(EvalObject {
                name: fx.name,
                mesh: fx.mesh,
                gt: fx.seg,
                pred,
            })
        })
        .collect::<openable::Result<_>>()?;
    println!("evaluating {} objects", objects.len());

    let report = evaluate(&objects, &MetricConfig::default())?;
    print!("{}", render_table(&report));

    // For contrast: a predictor that finds nothing scores zero recall and
    // pays the full dummy-transport cost for every missed part.
    let chest_fx = chest(false, 1.0, 0.6, 1.1);
    let triangle_count = chest_fx.mesh.triangles.len();
    let empty_pred = vec![EvalObject {
        name: "empty_prediction".into(),
        mesh: chest_fx.mesh,
        gt: chest_fx.seg,
        pred: openable::assets::PartSegmentation::from_parts(Vec::new(), triangle_count)?,
    }];
    let bad = evaluate(&empty_pred, &MetricConfig::default())?;
    println!(
        "\nempty prediction: micro R {:.3}, OC-cost {:.3}",
        bad.seg.micro.recall, bad.oc_cost
    );
    Ok(())
}
