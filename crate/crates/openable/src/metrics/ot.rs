//! Detection-correction cost: an optimal-transport distance between predicted
//! and ground-truth part boxes, mixing localization (3D GIoU) and
//! classification terms, with dummy bins absorbing unmatched mass.

use super::hungarian::hungarian;
use crate::assets::PartLabel;
use crate::geometry::{giou3d, Aabb};
use crate::Result;

pub const OC_LAMBDA: f64 = 0.5;
pub const OC_BETA: f64 = 0.6;

/// Pairwise correction cost between one prediction and one ground truth.
fn pair_cost(
    pred: &(PartLabel, f64, Aabb),
    gt: &(PartLabel, Aabb),
    lambda: f64,
) -> Result<f64> {
    let g = giou3d(&pred.2, &gt.1)?;
    let c_loc = (1.0 - g) / 2.0;
    let c_cls = if pred.0 == gt.0 {
        (1.0 - pred.1) / 2.0
    } else {
        (1.0 + pred.1) / 2.0
    };
    Ok(lambda * c_loc + (1.0 - lambda) * c_cls)
}

/// Total optimal-transport cost of correcting the predictions into the ground
/// truth. Mass is uniform over predictions plus one dummy (and symmetrically
/// for ground truths); transporting to or from a dummy costs `beta`, and the
/// plan is solved exactly by splitting each bin into equal-mass units and
/// running an assignment.
pub fn oc_cost(
    preds: &[(PartLabel, f64, Aabb)],
    gts: &[(PartLabel, Aabb)],
    lambda: f64,
    beta: f64,
) -> Result<f64> {
    let n = preds.len();
    let m = gts.len();
    if n == 0 && m == 0 {
        return Ok(0.0);
    }
    // Augmented (n+1)x(m+1) cost with dummy row/column.
    let mut aug = vec![vec![0.0f64; m + 1]; n + 1];
    for (i, p) in preds.iter().enumerate() {
        for (j, g) in gts.iter().enumerate() {
            aug[i][j] = pair_cost(p, g, lambda)?;
        }
        aug[i][m] = beta;
    }
    for j in 0..m {
        aug[n][j] = beta;
    }
    aug[n][m] = 0.0;

    // Row bin mass 1/(n+1), column bin mass 1/(m+1). Splitting each row bin
    // into (m+1) units and each column bin into (n+1) units yields
    // N = (n+1)(m+1) equal units per side; the transportation LP with integer
    // marginals has an integral optimum, so the assignment is exact.
    let rows = n + 1;
    let cols = m + 1;
    let units = rows * cols;
    let mut cost = vec![vec![0.0f64; units]; units];
    for (r, row) in cost.iter_mut().enumerate() {
        for (c, slot) in row.iter_mut().enumerate() {
            *slot = aug[r / cols][c / rows];
        }
    }
    let (_, total) = hungarian(&cost);
    Ok(total / units as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pt3;

    fn bx(min: [f64; 3], max: [f64; 3]) -> Aabb {
        Aabb::new(Pt3::from(min), Pt3::from(max))
    }

    /// Exact oracle: enumerate all integer transport plans on the scaled
    /// marginals (row bins carry `cols` units, column bins `rows` units).
    fn brute_force_ot(aug: &[Vec<f64>], rows: usize, cols: usize) -> f64 {
        let supply: Vec<usize> = vec![cols; rows];
        let demand: Vec<usize> = vec![rows; cols];
        let mut best = f64::INFINITY;
        let mut plan = vec![vec![0usize; cols]; rows];
        fn rec(
            aug: &[Vec<f64>],
            supply: &[usize],
            demand: &mut Vec<usize>,
            plan: &mut Vec<Vec<usize>>,
            r: usize,
            c: usize,
            left: usize,
            best: &mut f64,
        ) {
            let rows = supply.len();
            let cols = demand.len();
            if r == rows {
                if demand.iter().all(|&d| d == 0) {
                    let total: f64 = plan
                        .iter()
                        .enumerate()
                        .flat_map(|(i, row)| {
                            row.iter().enumerate().map(move |(j, &q)| (i, j, q))
                        })
                        .map(|(i, j, q)| q as f64 * aug[i][j])
                        .sum();
                    if total < *best {
                        *best = total;
                    }
                }
                return;
            }
            if c == cols {
                if left == 0 {
                    rec(aug, supply, demand, plan, r + 1, 0, supply.get(r + 1).copied().unwrap_or(0), best);
                }
                return;
            }
            let max_q = left.min(demand[c]);
            for q in 0..=max_q {
                plan[r][c] = q;
                demand[c] -= q;
                rec(aug, supply, demand, plan, r, c + 1, left - q, best);
                demand[c] += q;
                plan[r][c] = 0;
            }
        }
        rec(
            aug,
            &supply,
            &mut demand.clone(),
            &mut plan,
            0,
            0,
            supply[0],
            &mut best,
        );
        best / (rows * cols) as f64
    }

    #[test]
    fn perfect_prediction_costs_zero() {
        let b = bx([0.0; 3], [1.0, 1.0, 1.0]);
        let preds = vec![(PartLabel::Drawer, 1.0, b), (PartLabel::Door, 1.0, bx([2.0, 0.0, 0.0], [3.0, 1.0, 1.0]))];
        let gts = vec![(PartLabel::Drawer, b), (PartLabel::Door, bx([2.0, 0.0, 0.0], [3.0, 1.0, 1.0]))];
        let c = oc_cost(&preds, &gts, OC_LAMBDA, OC_BETA).unwrap();
        assert!(c.abs() < 1e-12, "{c}");
    }

    #[test]
    fn missing_prediction_pays_dummy() {
        let gts = vec![(PartLabel::Drawer, bx([0.0; 3], [1.0, 1.0, 1.0]))];
        let c = oc_cost(&[], &gts, OC_LAMBDA, OC_BETA).unwrap();
        // GT mass 1/2 routed through the dummy at cost beta.
        assert!((c - OC_BETA / 2.0).abs() < 1e-12, "{c}");
    }

    #[test]
    fn empty_both_is_zero() {
        assert_eq!(oc_cost(&[], &[], OC_LAMBDA, OC_BETA).unwrap(), 0.0);
    }

    #[test]
    fn matches_exhaustive_transport_enumeration() {
        let preds = vec![
            (PartLabel::Drawer, 0.9, bx([0.0; 3], [1.0, 1.0, 1.0])),
            (PartLabel::Door, 0.4, bx([0.5, 0.0, 0.0], [1.5, 1.0, 1.0])),
        ];
        let gts = vec![
            (PartLabel::Drawer, bx([0.1, 0.0, 0.0], [1.1, 1.0, 1.0])),
            (PartLabel::Lid, bx([3.0, 0.0, 0.0], [4.0, 1.0, 1.0])),
        ];
        let (n, m) = (preds.len(), gts.len());
        let mut aug = vec![vec![0.0f64; m + 1]; n + 1];
        for i in 0..n {
            for j in 0..m {
                aug[i][j] = pair_cost(&preds[i], &gts[j], OC_LAMBDA).unwrap();
            }
            aug[i][m] = OC_BETA;
        }
        for j in 0..m {
            aug[n][j] = OC_BETA;
        }
        let got = oc_cost(&preds, &gts, OC_LAMBDA, OC_BETA).unwrap();
        let want = brute_force_ot(&aug, n + 1, m + 1);
        assert!((got - want).abs() < 1e-9, "{got} vs {want}");
    }

    #[test]
    fn cost_decreases_as_box_slides_onto_gt() {
        let gt = bx([0.0; 3], [1.0, 1.0, 1.0]);
        let gts = vec![(PartLabel::Drawer, gt)];
        let mut prev = f64::INFINITY;
        for step in 0..=10 {
            let s = 2.0 * (1.0 - step as f64 / 10.0);
            let p = bx([s, 0.0, 0.0], [s + 1.0, 1.0, 1.0]);
            let c = oc_cost(&[(PartLabel::Drawer, 1.0, p)], &gts, OC_LAMBDA, OC_BETA).unwrap();
            assert!(c <= prev + 1e-12, "step {step}: {c} > {prev}");
            prev = c;
        }
        assert!(prev.abs() < 1e-12);
    }
}
