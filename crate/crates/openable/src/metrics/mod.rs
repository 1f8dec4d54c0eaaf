//! Evaluation suite: greedy part matching, segmentation precision/recall/F1,
//! motion-parameter accuracy, semantic and instance accuracy measures, and an
//! optimal-transport detection-correction cost.

mod hungarian;
mod ot;

pub use hungarian::hungarian;
pub use ot::{oc_cost, OC_BETA, OC_LAMBDA};

use crate::assets::{MotionSpec, MotionType, PartLabel, PartSegmentation};
use crate::geometry::{Aabb, TriMesh, Vec3};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default IoU threshold for part matching.
pub const IOU_THRESHOLD: f64 = 0.5;
/// Axis-angle tolerance in degrees for the axis criterion.
pub const AXIS_TOL_DEG: f64 = 5.0;
/// Origin tolerance as a fraction of the ground-truth part diagonal.
pub const ORIGIN_TOL_FRAC: f64 = 0.1;

/// One matched prediction/ground-truth pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchPair {
    pub pred_id: String,
    pub gt_id: String,
    pub label: PartLabel,
    pub iou: f64,
}

/// Result of matching one object's predicted parts to its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub pairs: Vec<MatchPair>,
    pub unmatched_preds: Vec<(String, PartLabel)>,
    pub unmatched_gts: Vec<(String, PartLabel)>,
}

impl Matching {
    pub fn pred_count(&self) -> usize {
        self.pairs.len() + self.unmatched_preds.len()
    }
    pub fn gt_count(&self) -> usize {
        self.pairs.len() + self.unmatched_gts.len()
    }
}

fn area_of(ids: &std::collections::BTreeSet<usize>, areas: &[f64]) -> f64 {
    ids.iter().map(|&t| areas[t]).sum()
}

fn weighted_iou(
    a: &std::collections::BTreeSet<usize>,
    b: &std::collections::BTreeSet<usize>,
    areas: &[f64],
) -> f64 {
    let inter: f64 = a.intersection(b).map(|&t| areas[t]).sum();
    let union = area_of(a, areas) + area_of(b, areas) - inter;
    if union <= 0.0 {
        0.0
    } else {
        inter / union
    }
}

/// Greedily match predicted parts to ground-truth parts of the same label:
/// predictions in descending confidence, each taking the unmatched ground
/// truth with the highest area-weighted IoU, provided it reaches the
/// threshold.
pub fn match_parts(
    preds: &PartSegmentation,
    gts: &PartSegmentation,
    areas: &[f64],
    iou_threshold: f64,
) -> Result<Matching> {
    if !(0.0..=1.0).contains(&iou_threshold) || iou_threshold <= 0.0 {
        return Err(Error::Config(format!(
            "IoU threshold must be in (0, 1], got {iou_threshold}"
        )));
    }
    let n = areas.len();
    for seg in [preds, gts] {
        if let Some(&t) = seg.parts.iter().flat_map(|p| p.triangle_ids.iter()).max() {
            if t >= n {
                return Err(Error::ShapeMismatch(format!(
                    "part references triangle {t} but only {n} areas given"
                )));
            }
        }
    }
    let mut order: Vec<usize> = (0..preds.parts.len()).collect();
    order.sort_by(|&a, &b| {
        preds.parts[b]
            .confidence
            .partial_cmp(&preds.parts[a].confidence)
            .unwrap()
            .then_with(|| preds.parts[a].id.cmp(&preds.parts[b].id))
    });
    let mut gt_taken = vec![false; gts.parts.len()];
    let mut pairs = Vec::new();
    let mut unmatched_preds = Vec::new();
    for pi in order {
        let pred = &preds.parts[pi];
        let mut best: Option<(usize, f64)> = None;
        for (gi, gt) in gts.parts.iter().enumerate() {
            if gt_taken[gi] || gt.label != pred.label {
                continue;
            }
            let iou = weighted_iou(&pred.triangle_ids, &gt.triangle_ids, areas);
            if iou >= iou_threshold && best.map_or(true, |(_, b)| iou > b) {
                best = Some((gi, iou));
            }
        }
        match best {
            Some((gi, iou)) => {
                gt_taken[gi] = true;
                pairs.push(MatchPair {
                    pred_id: pred.id.clone(),
                    gt_id: gts.parts[gi].id.clone(),
                    label: pred.label,
                    iou,
                });
            }
            None => unmatched_preds.push((pred.id.clone(), pred.label)),
        }
    }
    let unmatched_gts = gts
        .parts
        .iter()
        .enumerate()
        .filter(|(gi, _)| !gt_taken[*gi])
        .map(|(_, g)| (g.id.clone(), g.label))
        .collect();
    Ok(Matching {
        pairs,
        unmatched_preds,
        unmatched_gts,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

/// Segmentation detection scores, micro- and macro-averaged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegReport {
    pub micro: Prf,
    pub macro_: Prf,
    pub per_label: BTreeMap<PartLabel, Prf>,
    /// (matched, preds, gts) per object, in input order.
    pub per_object: Vec<(usize, usize, usize)>,
}

/// Aggregate matchings into precision/recall/F1. Micro pools counts across
/// the dataset; macro averages per-object scores, skipping objects where a
/// score is undefined (no predictions for P, no ground truths for R).
pub fn seg_prf(matchings: &[Matching]) -> Result<SegReport> {
    if matchings.is_empty() {
        return Err(Error::EmptyInput("no objects to aggregate"));
    }
    let mut matched = 0usize;
    let mut preds = 0usize;
    let mut gts = 0usize;
    let mut macro_p = Vec::new();
    let mut macro_r = Vec::new();
    let mut macro_f = Vec::new();
    let mut per_object = Vec::new();
    let mut label_counts: BTreeMap<PartLabel, (usize, usize, usize)> = BTreeMap::new();
    for m in matchings {
        let (mm, pp, gg) = (m.pairs.len(), m.pred_count(), m.gt_count());
        matched += mm;
        preds += pp;
        gts += gg;
        per_object.push((mm, pp, gg));
        let p = (pp > 0).then(|| mm as f64 / pp as f64);
        let r = (gg > 0).then(|| mm as f64 / gg as f64);
        if let Some(p) = p {
            macro_p.push(p);
        }
        if let Some(r) = r {
            macro_r.push(r);
        }
        if let (Some(p), Some(r)) = (p, r) {
            macro_f.push(f1(p, r));
        }
        for pair in &m.pairs {
            let e = label_counts.entry(pair.label).or_default();
            e.0 += 1;
            e.1 += 1;
            e.2 += 1;
        }
        for (_, l) in &m.unmatched_preds {
            label_counts.entry(*l).or_default().1 += 1;
        }
        for (_, l) in &m.unmatched_gts {
            label_counts.entry(*l).or_default().2 += 1;
        }
    }
    let ratio = |a: usize, b: usize| if b > 0 { a as f64 / b as f64 } else { 0.0 };
    let micro_p = ratio(matched, preds);
    let micro_r = ratio(matched, gts);
    let mean = |v: &[f64]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().sum::<f64>() / v.len() as f64
        }
    };
    let per_label = label_counts
        .into_iter()
        .map(|(l, (mm, pp, gg))| {
            let p = ratio(mm, pp);
            let r = ratio(mm, gg);
            (
                l,
                Prf {
                    precision: p,
                    recall: r,
                    f1: f1(p, r),
                },
            )
        })
        .collect();
    Ok(SegReport {
        micro: Prf {
            precision: micro_p,
            recall: micro_r,
            f1: f1(micro_p, micro_r),
        },
        macro_: Prf {
            precision: mean(&macro_p),
            recall: mean(&macro_r),
            f1: mean(&macro_f),
        },
        per_label,
        per_object,
    })
}

/// Sign-invariant angle between two axes, in degrees.
pub fn axis_angle_deg(a: Vec3, b: Vec3) -> f64 {
    let d = (a.normalize().dot(&b.normalize())).abs().clamp(0.0, 1.0);
    d.acos().to_degrees()
}

/// Distance from a point to the infinite line through `origin` along `axis`.
pub fn distance_to_axis(point: crate::geometry::Pt3, origin: crate::geometry::Pt3, axis: Vec3) -> f64 {
    let a = axis.normalize();
    let v = point - origin;
    (v - v.dot(&a) * a).norm()
}

/// Motion-parameter accuracy over matched parts, with cumulative criteria:
/// +M (type), +MA (type and axis), +MAO (type, axis, and origin).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionReport {
    pub matched: usize,
    pub total_preds: usize,
    pub total_gts: usize,
    pub precision_m: f64,
    pub precision_ma: f64,
    pub precision_mao: f64,
    pub recall_m: f64,
    pub recall_ma: f64,
    pub recall_mao: f64,
    /// Mean axis error in degrees over matched pairs (None when no pair has
    /// axes on both sides).
    pub ae_deg: Option<f64>,
    /// Mean pred-origin-to-GT-axis distance over matched revolute pairs,
    /// absolute and as a fraction of the GT part diagonal.
    pub oe_abs: Option<f64>,
    pub oe_frac: Option<f64>,
}

/// Everything motion evaluation needs about one matched pair.
#[derive(Debug, Clone)]
pub struct MotionPair {
    pub pred: Option<MotionSpec>,
    pub gt: Option<MotionSpec>,
    /// Diagonal of the GT part's axis-aligned bounding box.
    pub gt_diagonal: f64,
}

fn part_diagonal(mesh: &TriMesh, ids: &std::collections::BTreeSet<usize>) -> f64 {
    Aabb::from_points(
        ids.iter()
            .flat_map(|&t| mesh.triangle_vertices(t))
            .collect::<Vec<_>>(),
    )
    .diagonal()
}

/// Collect motion pairs for one object's matching.
pub fn motion_pairs(
    matching: &Matching,
    preds: &PartSegmentation,
    gts: &PartSegmentation,
    mesh: &TriMesh,
) -> Vec<MotionPair> {
    let find = |seg: &PartSegmentation, id: &str| {
        seg.parts.iter().position(|p| p.id == id).unwrap()
    };
    matching
        .pairs
        .iter()
        .map(|pair| {
            let p = &preds.parts[find(preds, &pair.pred_id)];
            let g = &gts.parts[find(gts, &pair.gt_id)];
            MotionPair {
                pred: p.motion.clone(),
                gt: g.motion.clone(),
                gt_diagonal: part_diagonal(mesh, &g.triangle_ids),
            }
        })
        .collect()
}

/// Aggregate motion accuracy. `total_preds`/`total_gts` are the dataset-wide
/// part counts used as precision/recall denominators.
pub fn motion_metrics(
    pairs: &[MotionPair],
    total_preds: usize,
    total_gts: usize,
    axis_tol_deg: f64,
    origin_tol_frac: f64,
) -> MotionReport {
    let mut m = 0usize;
    let mut ma = 0usize;
    let mut mao = 0usize;
    let mut angles = Vec::new();
    let mut oe_abs = Vec::new();
    let mut oe_frac = Vec::new();
    for pair in pairs {
        let (Some(p), Some(g)) = (&pair.pred, &pair.gt) else {
            continue; // missing motion fails +M
        };
        let angle = axis_angle_deg(p.axis, g.axis);
        angles.push(angle);
        if g.motion_type == MotionType::Revolute {
            if let (Some(po), Some(go)) = (p.origin, g.origin) {
                let d = distance_to_axis(po, go, g.axis);
                oe_abs.push(d);
                if pair.gt_diagonal > 0.0 {
                    oe_frac.push(d / pair.gt_diagonal);
                }
            }
        }
        if p.motion_type != g.motion_type {
            continue;
        }
        m += 1;
        if angle > axis_tol_deg {
            continue;
        }
        ma += 1;
        let origin_ok = match g.motion_type {
            MotionType::Prismatic => true,
            MotionType::Revolute => match (p.origin, g.origin) {
                (Some(po), Some(go)) => {
                    distance_to_axis(po, go, g.axis) <= origin_tol_frac * pair.gt_diagonal
                }
                _ => false,
            },
        };
        if origin_ok {
            mao += 1;
        }
    }
    let ratio = |a: usize, b: usize| if b > 0 { a as f64 / b as f64 } else { 0.0 };
    let mean = |v: &Vec<f64>| {
        if v.is_empty() {
            None
        } else {
            Some(v.iter().sum::<f64>() / v.len() as f64)
        }
    };
    MotionReport {
        matched: pairs.len(),
        total_preds,
        total_gts,
        precision_m: ratio(m, total_preds),
        precision_ma: ratio(ma, total_preds),
        precision_mao: ratio(mao, total_preds),
        recall_m: ratio(m, total_gts),
        recall_ma: ratio(ma, total_gts),
        recall_mao: ratio(mao, total_gts),
        ae_deg: mean(&angles),
        oe_abs: mean(&oe_abs),
        oe_frac: mean(&oe_frac),
    }
}

fn semantic_labels(seg: &PartSegmentation, n: usize) -> Vec<PartLabel> {
    let mut labels = vec![PartLabel::Base; n];
    for part in &seg.parts {
        for &t in &part.triangle_ids {
            labels[t] = part.label;
        }
    }
    labels
}

/// Semantic accuracy triple:
/// - CA: area-weighted fraction of correctly labeled triangles;
/// - NCA: mean per-GT-label accuracy (each label's correct area over that
///   label's total area);
/// - CA_nb: CA restricted to triangles where either side is openable, so
///   all-base predictions score 0.
pub fn ca_nca(
    pred: &PartSegmentation,
    gt: &PartSegmentation,
    areas: &[f64],
) -> Result<(f64, f64, f64)> {
    let n = areas.len();
    let pl = semantic_labels(pred, n);
    let gl = semantic_labels(gt, n);
    let mut correct = 0.0;
    let mut total = 0.0;
    let mut per_label: BTreeMap<PartLabel, (f64, f64)> = BTreeMap::new();
    let mut nb_correct = 0.0;
    let mut nb_total = 0.0;
    for t in 0..n {
        let a = areas[t];
        let ok = pl[t] == gl[t];
        total += a;
        if ok {
            correct += a;
        }
        let e = per_label.entry(gl[t]).or_default();
        e.1 += a;
        if ok {
            e.0 += a;
        }
        if pl[t].is_openable() || gl[t].is_openable() {
            nb_total += a;
            if ok {
                nb_correct += a;
            }
        }
    }
    if total <= 0.0 {
        return Err(Error::EmptyInput("zero total area"));
    }
    let ca = correct / total;
    let accs: Vec<f64> = per_label
        .values()
        .filter(|(_, tot)| *tot > 0.0)
        .map(|(c, tot)| c / tot)
        .collect();
    let nca = if accs.is_empty() {
        0.0
    } else {
        accs.iter().sum::<f64>() / accs.len() as f64
    };
    let ca_nb = if nb_total > 0.0 {
        nb_correct / nb_total
    } else {
        0.0
    };
    Ok((ca, nca, ca_nb))
}

/// Area-weighted adjusted Rand index between the two instance partitions
/// (parts plus the base as one cluster). Areas are rescaled to mean 1 so the
/// equal-area case reduces exactly to the textbook integer formula.
pub fn ari(pred: &PartSegmentation, gt: &PartSegmentation, areas: &[f64]) -> Result<f64> {
    let n = areas.len();
    if n == 0 {
        return Err(Error::EmptyInput("zero triangles"));
    }
    let total: f64 = areas.iter().sum();
    if total <= 0.0 {
        return Err(Error::EmptyInput("zero total area"));
    }
    let scale = n as f64 / total;
    let po = pred.owner_of(n);
    let go = gt.owner_of(n);
    let cluster = |o: &Option<usize>| o.map_or(0usize, |i| i + 1);
    let mut cont: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut rows: BTreeMap<usize, f64> = BTreeMap::new();
    let mut cols: BTreeMap<usize, f64> = BTreeMap::new();
    for t in 0..n {
        let w = areas[t] * scale;
        let (i, j) = (cluster(&go[t]), cluster(&po[t]));
        *cont.entry((i, j)).or_default() += w;
        *rows.entry(i).or_default() += w;
        *cols.entry(j).or_default() += w;
    }
    let comb2 = |x: f64| x * (x - 1.0) / 2.0;
    let index: f64 = cont.values().map(|&x| comb2(x)).sum();
    let sum_rows: f64 = rows.values().map(|&x| comb2(x)).sum();
    let sum_cols: f64 = cols.values().map(|&x| comb2(x)).sum();
    let total_w = n as f64;
    let expected = sum_rows * sum_cols / comb2(total_w).max(f64::MIN_POSITIVE);
    let max = 0.5 * (sum_rows + sum_cols);
    if (max - expected).abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok((index - expected) / (max - expected))
}

/// One object ready for evaluation: its mesh with aligned ground-truth and
/// predicted segmentations.
#[derive(Debug, Clone)]
pub struct EvalObject {
    pub name: String,
    pub mesh: TriMesh,
    pub gt: PartSegmentation,
    pub pred: PartSegmentation,
}

/// Tolerances and thresholds for [`evaluate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub iou_threshold: f64,
    pub axis_tol_deg: f64,
    pub origin_tol_frac: f64,
    pub oc_lambda: f64,
    pub oc_beta: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            iou_threshold: IOU_THRESHOLD,
            axis_tol_deg: AXIS_TOL_DEG,
            origin_tol_frac: ORIGIN_TOL_FRAC,
            oc_lambda: OC_LAMBDA,
            oc_beta: OC_BETA,
        }
    }
}

/// Per-object metric row in the full report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectReport {
    pub name: String,
    pub matched: usize,
    pub preds: usize,
    pub gts: usize,
    pub ca: f64,
    pub nca: f64,
    pub ca_nb: f64,
    pub ari: f64,
    pub oc_cost: f64,
}

/// Full evaluation report over a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub seg: SegReport,
    pub motion: MotionReport,
    pub ca: f64,
    pub nca: f64,
    pub ca_nb: f64,
    pub ari: f64,
    pub oc_cost: f64,
    pub objects: Vec<ObjectReport>,
}

fn part_boxes(seg: &PartSegmentation, mesh: &TriMesh) -> Vec<(PartLabel, f64, Aabb)> {
    seg.parts
        .iter()
        .map(|p| {
            (
                p.label,
                p.confidence,
                Aabb::from_points(p.triangle_ids.iter().flat_map(|&t| mesh.triangle_vertices(t))),
            )
        })
        .collect()
}

/// Evaluate a dataset: matching-based P/R/F1, motion accuracy, CA/NCA/CA_nb,
/// ARI, and mean OC-cost. Objects are processed in name order so the report
/// is independent of input ordering.
pub fn evaluate(objects: &[EvalObject], cfg: &MetricConfig) -> Result<EvalReport> {
    if objects.is_empty() {
        return Err(Error::EmptyInput("no objects to evaluate"));
    }
    let mut order: Vec<usize> = (0..objects.len()).collect();
    order.sort_by(|&a, &b| objects[a].name.cmp(&objects[b].name));

    let mut matchings = Vec::new();
    let mut pairs = Vec::new();
    let mut rows = Vec::new();
    let mut ca_sum = 0.0;
    let mut nca_sum = 0.0;
    let mut canb_sum = 0.0;
    let mut ari_sum = 0.0;
    let mut oc_sum = 0.0;
    for &i in &order {
        let obj = &objects[i];
        let areas = obj.mesh.triangle_areas();
        let matching = match_parts(&obj.pred, &obj.gt, &areas, cfg.iou_threshold)?;
        pairs.extend(motion_pairs(&matching, &obj.pred, &obj.gt, &obj.mesh));
        let (ca, nca, ca_nb) = ca_nca(&obj.pred, &obj.gt, &areas)?;
        let a = ari(&obj.pred, &obj.gt, &areas)?;
        let oc = oc_cost(
            &part_boxes(&obj.pred, &obj.mesh),
            &obj.gt
                .parts
                .iter()
                .map(|p| {
                    (
                        p.label,
                        Aabb::from_points(
                            p.triangle_ids.iter().flat_map(|&t| obj.mesh.triangle_vertices(t)),
                        ),
                    )
                })
                .collect::<Vec<_>>(),
            cfg.oc_lambda,
            cfg.oc_beta,
        )?;
        ca_sum += ca;
        nca_sum += nca;
        canb_sum += ca_nb;
        ari_sum += a;
        oc_sum += oc;
        rows.push(ObjectReport {
            name: obj.name.clone(),
            matched: matching.pairs.len(),
            preds: matching.pred_count(),
            gts: matching.gt_count(),
            ca,
            nca,
            ca_nb,
            ari: a,
            oc_cost: oc,
        });
        matchings.push(matching);
    }
    let seg = seg_prf(&matchings)?;
    let total_preds: usize = matchings.iter().map(|m| m.pred_count()).sum();
    let total_gts: usize = matchings.iter().map(|m| m.gt_count()).sum();
    let motion = motion_metrics(
        &pairs,
        total_preds,
        total_gts,
        cfg.axis_tol_deg,
        cfg.origin_tol_frac,
    );
    let k = objects.len() as f64;
    Ok(EvalReport {
        seg,
        motion,
        ca: ca_sum / k,
        nca: nca_sum / k,
        ca_nb: canb_sum / k,
        ari: ari_sum / k,
        oc_cost: oc_sum / k,
        objects: rows,
    })
}

/// Human-readable summary table (Markdown).
pub fn render_table(report: &EvalReport) -> String {
    let mut s = String::new();
    use std::fmt::Write;
    let _ = writeln!(s, "| metric | value |");
    let _ = writeln!(s, "|---|---|");
    let rows = [
        ("micro P", report.seg.micro.precision),
        ("micro R", report.seg.micro.recall),
        ("micro F1", report.seg.micro.f1),
        ("macro P", report.seg.macro_.precision),
        ("macro R", report.seg.macro_.recall),
        ("macro F1", report.seg.macro_.f1),
        ("P@M", report.motion.precision_m),
        ("P@MA", report.motion.precision_ma),
        ("P@MAO", report.motion.precision_mao),
        ("R@M", report.motion.recall_m),
        ("R@MA", report.motion.recall_ma),
        ("R@MAO", report.motion.recall_mao),
        ("CA", report.ca),
        ("NCA", report.nca),
        ("CA_nb", report.ca_nb),
        ("ARI", report.ari),
        ("OC-cost", report.oc_cost),
    ];
    for (name, v) in rows {
        let _ = writeln!(s, "| {name} | {v:.4} |");
    }
    if let Some(ae) = report.motion.ae_deg {
        let _ = writeln!(s, "| AE (deg) | {ae:.4} |");
    }
    if let Some(oe) = report.motion.oe_abs {
        let _ = writeln!(s, "| OE (abs) | {oe:.4} |");
    }
    if let Some(oe) = report.motion.oe_frac {
        let _ = writeln!(s, "| OE (frac of diag) | {oe:.4} |");
    }
    s
}
