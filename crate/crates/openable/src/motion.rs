//! Heuristic motion prediction: motion type from per-label statistics,
//! prismatic axes from the outward front direction, revolute axes from
//! bounding-box edge selection driven by base alignment and handle detection.

use crate::assets::{MotionSpec, MotionType, PartLabel, PartSegmentation};
use crate::geometry::{gravity_obb, Frame, OrientedBox, Pt3, TriMesh, Vec3};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Default number of depth bins for handle detection.
pub const HANDLE_BINS: usize = 32;

/// Fraction of part vertices that must sit in front of the face plane to
/// count as a raised handle.
pub const RAISED_FRACTION: f64 = 0.02;

/// Per-label motion type counts, typically gathered from a training set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MotionTypeStats {
    pub counts: BTreeMap<PartLabel, LabelCounts>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelCounts {
    pub prismatic: u64,
    pub revolute: u64,
}

impl Default for MotionTypeStats {
    /// Drawers slide, doors and lids swing.
    fn default() -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(PartLabel::Drawer, LabelCounts { prismatic: 1, revolute: 0 });
        counts.insert(PartLabel::Door, LabelCounts { prismatic: 0, revolute: 1 });
        counts.insert(PartLabel::Lid, LabelCounts { prismatic: 0, revolute: 1 });
        MotionTypeStats { counts }
    }
}

impl MotionTypeStats {
    /// Accumulate counts from annotated segmentations.
    pub fn from_annotations<'a>(segs: impl IntoIterator<Item = &'a PartSegmentation>) -> Self {
        let mut counts: BTreeMap<PartLabel, LabelCounts> = BTreeMap::new();
        for seg in segs {
            for part in &seg.parts {
                if let Some(m) = &part.motion {
                    let e = counts.entry(part.label).or_default();
                    match m.motion_type {
                        MotionType::Prismatic => e.prismatic += 1,
                        MotionType::Revolute => e.revolute += 1,
                    }
                }
            }
        }
        MotionTypeStats { counts }
    }
}

/// Most frequent motion type for the label; falls back to the default
/// mapping when the label is absent from the stats. Ties go to prismatic.
pub fn predict_motion_type(label: PartLabel, stats: &MotionTypeStats) -> Result<MotionType> {
    if !label.is_openable() {
        return Err(Error::NotOpenable);
    }
    let c = stats
        .counts
        .get(&label)
        .copied()
        .or_else(|| MotionTypeStats::default().counts.get(&label).copied())
        .unwrap_or_default();
    Ok(if c.prismatic >= c.revolute {
        MotionType::Prismatic
    } else {
        MotionType::Revolute
    })
}

/// Relabel a gravity-aligned box so its front axis is the thin horizontal
/// axis (openable parts are plates: the face normal is the thin direction),
/// signed to point away from `reference` (the object centroid). Using the
/// extents rather than the frame's canonical front keeps the downstream
/// heuristics equivariant under arbitrary yaw, and using the offset only for
/// the sign keeps laterally offset parts (e.g. one door of a pair) stable.
pub fn orient_outward(box_: &OrientedBox, reference: Pt3) -> OrientedBox {
    let (mut front, hf, hr) = if box_.half_extents.y <= box_.half_extents.x {
        (box_.front(), box_.half_extents.y, box_.half_extents.x)
    } else {
        (box_.right(), box_.half_extents.x, box_.half_extents.y)
    };
    if (box_.center - reference).dot(&front) < 0.0 {
        front = -front;
    }
    let up = box_.up();
    OrientedBox {
        center: box_.center,
        axes: [front.cross(&up), front, up],
        half_extents: Vec3::new(hr, hf, box_.half_extents.z),
    }
}

/// Slide axis for a drawer-like part: the box front axis, pointing away from
/// the object centroid.
pub fn predict_prismatic_axis(part_box: &OrientedBox, object_centroid: Pt3) -> Vec3 {
    let mut axis = part_box.front();
    if (part_box.center - object_centroid).dot(&axis) < 0.0 {
        axis = -axis;
    }
    axis
}

/// Which face of the part box (perpendicular to its front axis) hosts the
/// hinge candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectedFace {
    Front,
    Back,
}

/// Corners of a face in a fixed order: (lateral-, bottom), (lateral+,
/// bottom), (lateral+, top), (lateral-, top).
pub fn face_corners(box_: &OrientedBox, face: SelectedFace) -> [Pt3; 4] {
    let f = match face {
        SelectedFace::Front => box_.half_extents.y,
        SelectedFace::Back => -box_.half_extents.y,
    };
    let (hr, hu) = (box_.half_extents.x, box_.half_extents.z);
    [
        box_.from_local(Vec3::new(-hr, f, -hu)),
        box_.from_local(Vec3::new(hr, f, -hu)),
        box_.from_local(Vec3::new(hr, f, hu)),
        box_.from_local(Vec3::new(-hr, f, hu)),
    ]
}

/// Face edges in candidate order: vertical lateral-, vertical lateral+,
/// horizontal top, horizontal bottom.
fn face_edges(box_: &OrientedBox, face: SelectedFace) -> [(Pt3, Pt3); 4] {
    let [bl, br, tr, tl] = face_corners(box_, face);
    [(bl, tl), (br, tr), (tl, tr), (bl, br)]
}

fn box_edges(box_: &OrientedBox) -> Vec<(Pt3, Pt3)> {
    let c = box_.corners();
    // corner bit layout: 1 = +right, 2 = +front, 4 = +up.
    let pairs = [
        (0, 1), (2, 3), (4, 5), (6, 7), // along right
        (0, 2), (1, 3), (4, 6), (5, 7), // along front
        (0, 4), (1, 5), (2, 6), (3, 7), // along up
    ];
    pairs.iter().map(|&(a, b)| (c[a], c[b])).collect()
}

/// Minimum distance between two segments.
fn segment_distance(a: (Pt3, Pt3), b: (Pt3, Pt3)) -> f64 {
    // Ericson, Real-Time Collision Detection, 5.1.9 (closest point of two
    // segments).
    let d1 = a.1 - a.0;
    let d2 = b.1 - b.0;
    let r = a.0 - b.0;
    let aa = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    let (s, t);
    if aa <= 1e-18 && e <= 1e-18 {
        return r.norm();
    }
    if aa <= 1e-18 {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= 1e-18 {
            t = 0.0;
            s = (-c / aa).clamp(0.0, 1.0);
        } else {
            let bb = d1.dot(&d2);
            let denom = aa * e - bb * bb;
            let mut s_ = if denom != 0.0 {
                ((bb * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t_ = (bb * s_ + f) / e;
            if t_ < 0.0 {
                t_ = 0.0;
                s_ = (-c / aa).clamp(0.0, 1.0);
            } else if t_ > 1.0 {
                t_ = 1.0;
                s_ = ((bb - c) / aa).clamp(0.0, 1.0);
            }
            s = s_;
            t = t_;
        }
    }
    ((a.0 + d1 * s) - (b.0 + d2 * t)).norm()
}

fn point_segment_distance(p: Pt3, seg: (Pt3, Pt3)) -> f64 {
    let d = seg.1 - seg.0;
    let l2 = d.norm_squared();
    if l2 <= 1e-18 {
        return (p - seg.0).norm();
    }
    let t = ((p - seg.0).dot(&d) / l2).clamp(0.0, 1.0);
    (p - (seg.0 + d * t)).norm()
}

/// Pick the part face whose edges sit closest to the base box's edges: the
/// hinge line hugs the cabinet body. Ties go to the front face.
pub fn select_face(part_box: &OrientedBox, base_box: &OrientedBox) -> SelectedFace {
    let base = box_edges(base_box);
    let total = |face: SelectedFace| -> f64 {
        face_edges(part_box, face)
            .iter()
            .map(|&e| {
                base.iter()
                    .map(|&b| segment_distance(e, b))
                    .fold(f64::INFINITY, f64::min)
            })
            .sum()
    };
    if total(SelectedFace::Front) <= total(SelectedFace::Back) {
        SelectedFace::Front
    } else {
        SelectedFace::Back
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HandleRegion {
    Raised,
    Concave,
    None,
}

#[derive(Debug, Clone)]
pub struct HandleEstimate {
    pub region: HandleRegion,
    pub centroid: Pt3,
    /// Vertex count per depth bin, front to back.
    pub depth_profile: Vec<usize>,
}

/// Find a handle by binning part vertices front-to-back along the box front
/// axis. The fullest bin is the part's face plane; a vertex cluster strictly
/// in front of it is a raised handle (knob/bar), and for front-thin plates a
/// cluster recessed between the face plane and the back sheet is a concave
/// grip pocket.
pub fn detect_handle(
    part_mesh: &TriMesh,
    part_box: &OrientedBox,
    bins: usize,
) -> Result<HandleEstimate> {
    if part_mesh.vertices.is_empty() {
        return Err(Error::EmptyInput("part mesh has no vertices"));
    }
    debug_assert!(bins >= 4);
    let hf = part_box.half_extents.y.max(1e-12);
    let bin_of = |p: Pt3| -> usize {
        let f = part_box.to_local(p).y;
        // Bin 0 is the frontmost slab.
        (((hf - f) / (2.0 * hf) * bins as f64) as isize).clamp(0, bins as isize - 1) as usize
    };
    let mut profile = vec![0usize; bins];
    for &v in &part_mesh.vertices {
        profile[bin_of(v)] += 1;
    }
    // Frontmost fullest bin: front and back sheets of a thin slab tie, and
    // the face plane we want is the front one.
    let dominant = profile
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .unwrap()
        .0;

    let raised: Vec<Pt3> = part_mesh
        .vertices
        .iter()
        .copied()
        .filter(|&v| bin_of(v) < dominant)
        .collect();
    if raised.len() as f64 >= RAISED_FRACTION * part_mesh.vertices.len() as f64 {
        let c = Pt3::from(raised.iter().map(|p| p.coords).sum::<Vec3>() / raised.len() as f64);
        return Ok(HandleEstimate {
            region: HandleRegion::Raised,
            centroid: c,
            depth_profile: profile,
        });
    }

    // Concave grip: only meaningful for a plate that is thin along its front
    // axis (doors, drawer fronts). A pocket shows up as vertices recessed
    // strictly between the face plane and the back sheet of the plate.
    if part_box.half_extents.y <= 0.25 * part_box.half_extents.x.min(part_box.half_extents.z) {
        let back = profile.iter().rposition(|&c| c > 0).unwrap_or(dominant);
        let pocket: Vec<Pt3> = part_mesh
            .vertices
            .iter()
            .copied()
            .filter(|&v| {
                let b = bin_of(v);
                b > dominant && b < back
            })
            .collect();
        if pocket.len() as f64 >= RAISED_FRACTION * part_mesh.vertices.len() as f64 {
            let c =
                Pt3::from(pocket.iter().map(|p| p.coords).sum::<Vec3>() / pocket.len() as f64);
            return Ok(HandleEstimate {
                region: HandleRegion::Concave,
                centroid: c,
                depth_profile: profile,
            });
        }
    }

    Ok(HandleEstimate {
        region: HandleRegion::None,
        centroid: part_box.center,
        depth_profile: profile,
    })
}

/// Choose the hinge edge on the selected face and orient the axis so a
/// positive rotation opens the part outward/upward.
///
/// With a handle: the candidate edge farthest from the handle centroid (all
/// four edges for doors; lids consider only the two horizontal edges, since
/// a lid's short vertical edges never carry hinges). Without one: doors
/// hinge on the vertical edge farther from the object's lateral center,
/// lids on the top horizontal edge.
pub fn predict_revolute_axis(
    part_box: &OrientedBox,
    face: SelectedFace,
    handle: &HandleEstimate,
    label: PartLabel,
    object_centroid: Pt3,
    part_centroid: Pt3,
) -> Result<(Vec3, Pt3)> {
    let he = part_box.half_extents;
    if he.x < 1e-12 || he.z < 1e-12 {
        return Err(Error::DegenerateBox);
    }
    let edges = face_edges(part_box, face);
    let candidates: &[usize] = if label == PartLabel::Lid {
        &[2, 3]
    } else {
        &[0, 1, 2, 3]
    };

    let chosen = if handle.region == HandleRegion::None {
        match label {
            PartLabel::Lid => 2, // top horizontal edge
            _ => {
                // Vertical edge farther from the object's lateral center.
                let lat = |e: (Pt3, Pt3)| {
                    let mid = Pt3::from((e.0.coords + e.1.coords) * 0.5);
                    ((mid - object_centroid).dot(&part_box.right())).abs()
                };
                if lat(edges[0]) >= lat(edges[1]) {
                    0
                } else {
                    1
                }
            }
        }
    } else {
        // Farthest candidate from the handle; ties prefer vertical edges,
        // then the lower index (candidate order encodes both).
        *candidates
            .iter()
            .max_by(|&&a, &&b| {
                point_segment_distance(handle.centroid, edges[a])
                    .partial_cmp(&point_segment_distance(handle.centroid, edges[b]))
                    .unwrap()
                    .then(b.cmp(&a))
            })
            .unwrap()
    };

    let (e0, e1) = edges[chosen];
    let origin = Pt3::from((e0.coords + e1.coords) * 0.5);
    let mut axis = (e1 - e0).normalize();
    // Sign: positive rotation must sweep the part outward (along +front) or,
    // for lids, upward — captured jointly by the front+up direction.
    let v = part_centroid - origin;
    let open_dir = part_box.front() + part_box.up();
    if (axis.cross(&v)).dot(&open_dir) < 0.0 {
        axis = -axis;
    }
    Ok((axis, origin))
}

/// Run the full heuristic over a segmentation: every openable part receives
/// a MotionSpec. A part whose prediction fails keeps `motion: None` and logs
/// a warning instead of aborting the object.
pub fn predict_motion(
    seg: &PartSegmentation,
    mesh: &TriMesh,
    frame: &Frame,
    stats: &MotionTypeStats,
) -> Result<PartSegmentation> {
    let object_centroid = mesh.surface_centroid();
    let base_mesh = if seg.base_triangles.is_empty() {
        mesh.clone()
    } else {
        mesh.submesh(seg.base_triangles.iter().copied())
    };
    let base_box = gravity_obb(&base_mesh.vertices, frame)?;

    let mut out = seg.clone();
    for part in &mut out.parts {
        match predict_part_motion(part.label, &part.triangle_ids, mesh, frame, stats, object_centroid, &base_box) {
            Ok(m) => part.motion = Some(m),
            Err(e) => {
                log::warn!("motion prediction failed for part {:?}: {e}", part.id);
                part.motion = None;
            }
        }
    }
    Ok(out)
}

fn predict_part_motion(
    label: PartLabel,
    triangle_ids: &std::collections::BTreeSet<usize>,
    mesh: &TriMesh,
    frame: &Frame,
    stats: &MotionTypeStats,
    object_centroid: Pt3,
    base_box: &OrientedBox,
) -> Result<MotionSpec> {
    let part_mesh = mesh.submesh(triangle_ids.iter().copied());
    if part_mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let raw_box = gravity_obb(&part_mesh.vertices, frame)?;
    let part_box = orient_outward(&raw_box, object_centroid);
    match predict_motion_type(label, stats)? {
        MotionType::Prismatic => Ok(MotionSpec::prismatic(
            predict_prismatic_axis(&part_box, object_centroid),
            None,
        )),
        MotionType::Revolute => {
            let face = select_face(&part_box, base_box);
            let handle = detect_handle(&part_mesh, &part_box, HANDLE_BINS)?;
            let (axis, origin) = predict_revolute_axis(
                &part_box,
                face,
                &handle,
                label,
                object_centroid,
                part_mesh.surface_centroid(),
            )?;
            Ok(MotionSpec::revolute(
                axis,
                origin,
                Some([0.0, std::f64::consts::FRAC_PI_2]),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{chest, door_cabinet, dresser, fixture_suite, grid_box, HandleSide};
    use approx::assert_abs_diff_eq;

    #[test]
    fn type_stats_defaults() {
        let stats = MotionTypeStats::default();
        assert_eq!(
            predict_motion_type(PartLabel::Drawer, &stats).unwrap(),
            MotionType::Prismatic
        );
        assert_eq!(
            predict_motion_type(PartLabel::Door, &stats).unwrap(),
            MotionType::Revolute
        );
        assert_eq!(
            predict_motion_type(PartLabel::Lid, &stats).unwrap(),
            MotionType::Revolute
        );
        assert!(matches!(
            predict_motion_type(PartLabel::Base, &stats),
            Err(Error::NotOpenable)
        ));
    }

    #[test]
    fn type_stats_argmax() {
        let mut stats = MotionTypeStats::default();
        stats.counts.insert(
            PartLabel::Door,
            LabelCounts { prismatic: 10, revolute: 1 },
        );
        assert_eq!(
            predict_motion_type(PartLabel::Door, &stats).unwrap(),
            MotionType::Prismatic
        );
    }

    #[test]
    fn prismatic_axis_outward() {
        let fx = dresser(1, 1.0, 0.6, 1.1);
        let part_mesh = fx.mesh.submesh(fx.seg.parts[0].triangle_ids.iter().copied());
        let centroid = fx.mesh.surface_centroid();
        let raw = gravity_obb(&part_mesh.vertices, &fx.frame).unwrap();
        let part_box = orient_outward(&raw, centroid);
        let axis = predict_prismatic_axis(&part_box, centroid);
        assert_abs_diff_eq!(axis, Vec3::x(), epsilon = 1e-9);

        // Centroid on the other side flips the axis.
        let flipped = predict_prismatic_axis(&part_box, Pt3::new(10.0, 0.0, 0.5));
        assert_abs_diff_eq!(flipped, -Vec3::x(), epsilon = 1e-9);
    }

    #[test]
    fn face_selection_prefers_edge_hugging_face() {
        // Door slab just inside the base front plane: its back face edges
        // hug the base edges more closely than the knob-extended front.
        let fx = door_cabinet(HandleSide::Right, 0.8, 0.6, 1.0);
        let part_mesh = fx.mesh.submesh(fx.seg.parts[0].triangle_ids.iter().copied());
        let base_mesh = fx.mesh.submesh(fx.seg.base_triangles.iter().copied());
        let centroid = fx.mesh.surface_centroid();
        let part_box = orient_outward(
            &gravity_obb(&part_mesh.vertices, &fx.frame).unwrap(),
            centroid,
        );
        let base_box = gravity_obb(&base_mesh.vertices, &fx.frame).unwrap();
        assert_eq!(select_face(&part_box, &base_box), SelectedFace::Back);
    }

    #[test]
    fn face_selection_tie_prefers_front() {
        let b = gravity_obb(
            &crate::fixtures::unit_cube().vertices,
            &Frame::canonical(),
        )
        .unwrap();
        assert_eq!(select_face(&b, &b), SelectedFace::Front);
    }

    #[test]
    fn handle_raised_knob_detected() {
        let fx = door_cabinet(HandleSide::Right, 0.8, 0.6, 1.0);
        let part_mesh = fx.mesh.submesh(fx.seg.parts[0].triangle_ids.iter().copied());
        let centroid = fx.mesh.surface_centroid();
        let part_box = orient_outward(
            &gravity_obb(&part_mesh.vertices, &fx.frame).unwrap(),
            centroid,
        );
        let h = detect_handle(&part_mesh, &part_box, HANDLE_BINS).unwrap();
        assert_eq!(h.region, HandleRegion::Raised);
        assert_eq!(h.depth_profile.len(), HANDLE_BINS);
        // Knob sits at y = door_center + half_width - 0.1, mid height.
        assert!((h.centroid.y - (0.35 - 0.1)).abs() < 0.01, "{}", h.centroid.y);
        assert!((h.centroid.z - 0.5).abs() < 0.01);
    }

    #[test]
    fn handle_flat_plane_none() {
        let fx = door_cabinet(HandleSide::None, 0.8, 0.6, 1.0);
        let part_mesh = fx.mesh.submesh(fx.seg.parts[0].triangle_ids.iter().copied());
        let centroid = fx.mesh.surface_centroid();
        let part_box = orient_outward(
            &gravity_obb(&part_mesh.vertices, &fx.frame).unwrap(),
            centroid,
        );
        let h = detect_handle(&part_mesh, &part_box, HANDLE_BINS).unwrap();
        assert_eq!(h.region, HandleRegion::None);
    }

    #[test]
    fn handle_concave_pocket_detected() {
        // Thin panel with a small recessed pocket between its sheets.
        let mut mesh = grid_box(Pt3::new(0.0, 0.0, 0.5), Vec3::new(0.01, 0.5, 0.5), [1, 4, 8]);
        mesh.append(&grid_box(
            Pt3::new(0.0, 0.1, 0.6),
            Vec3::new(0.005, 0.05, 0.05),
            [1, 1, 1],
        ));
        let part_box = OrientedBox {
            center: Pt3::new(0.0, 0.0, 0.5),
            axes: [-Vec3::y(), Vec3::x(), Vec3::z()],
            half_extents: Vec3::new(0.5, 0.01, 0.5),
        };
        let h = detect_handle(&mesh, &part_box, HANDLE_BINS).unwrap();
        assert_eq!(h.region, HandleRegion::Concave);
        assert!((h.centroid.y - 0.1).abs() < 1e-9, "{}", h.centroid.y);
        assert!((h.centroid.z - 0.6).abs() < 1e-9, "{}", h.centroid.z);
    }

    #[test]
    fn empty_part_rejected() {
        let b = gravity_obb(&[Pt3::origin()], &Frame::canonical()).unwrap();
        assert!(matches!(
            detect_handle(&TriMesh::default(), &b, HANDLE_BINS),
            Err(Error::EmptyInput(_))
        ));
    }

    /// End-to-end check on every fixture: exact type, axis within 1e-6,
    /// origin within 1e-6 of the constructed ground truth.
    #[test]
    fn fixture_suite_exact_recovery() {
        let suite = fixture_suite();
        assert!(suite.len() >= 30);
        for fx in &suite {
            let pred = predict_motion(&fx.seg, &fx.mesh, &fx.frame, &MotionTypeStats::default())
                .unwrap();
            for (got, want) in pred.parts.iter().zip(&fx.seg.parts) {
                let g = got.motion.as_ref().expect("motion missing");
                let w = want.motion.as_ref().unwrap();
                assert_eq!(g.motion_type, w.motion_type, "{} {}", fx.name, want.id);
                assert!(
                    (g.axis - w.axis).norm() < 1e-6,
                    "{} {}: axis {:?} vs {:?}",
                    fx.name,
                    want.id,
                    g.axis,
                    w.axis
                );
                match (g.origin, w.origin) {
                    (None, None) => {}
                    (Some(go), Some(wo)) => {
                        // Compare distance to the hinge line (origin may sit
                        // anywhere on it).
                        let d = (go - wo) - (go - wo).dot(&w.axis) * w.axis;
                        assert!(
                            d.norm() < 1e-6,
                            "{} {}: origin {:?} vs {:?}",
                            fx.name,
                            want.id,
                            go,
                            wo
                        );
                    }
                    _ => panic!("{} {}: origin presence mismatch", fx.name, want.id),
                }
            }
        }
    }

    #[test]
    fn lid_fallback_and_latch() {
        for latch in [false, true] {
            let fx = chest(latch, 0.9, 0.6, 0.5);
            let pred = predict_motion(&fx.seg, &fx.mesh, &fx.frame, &MotionTypeStats::default())
                .unwrap();
            let g = pred.parts[0].motion.as_ref().unwrap();
            let w = fx.seg.parts[0].motion.as_ref().unwrap();
            assert!((g.axis - w.axis).norm() < 1e-6, "latch={latch}");
            assert!(
                (g.origin.unwrap().z - w.origin.unwrap().z).abs() < 1e-6,
                "latch={latch}: {} vs {}",
                g.origin.unwrap().z,
                w.origin.unwrap().z
            );
        }
    }

    #[test]
    fn positive_rotation_opens_outward() {
        // Rotating the door by +10 degrees about the predicted axis must move
        // its centroid along +front.
        let fx = door_cabinet(HandleSide::Right, 0.8, 0.6, 1.0);
        let pred = predict_motion(&fx.seg, &fx.mesh, &fx.frame, &MotionTypeStats::default())
            .unwrap();
        let m = pred.parts[0].motion.as_ref().unwrap();
        let part_mesh = fx.mesh.submesh(fx.seg.parts[0].triangle_ids.iter().copied());
        let c = part_mesh.surface_centroid();
        let o = m.origin.unwrap();
        let rot = nalgebra::Rotation3::from_axis_angle(
            &nalgebra::Unit::new_normalize(m.axis),
            10f64.to_radians(),
        );
        let moved = rot * (c - o) + o.coords;
        assert!((Pt3::from(moved) - c).dot(&Vec3::x()) > 0.0);
    }

    #[test]
    fn empty_segmentation_identity() {
        let fx = dresser(1, 1.0, 0.6, 1.1);
        let seg = PartSegmentation::from_parts(vec![], fx.mesh.triangles.len()).unwrap();
        let out = predict_motion(&seg, &fx.mesh, &fx.frame, &MotionTypeStats::default()).unwrap();
        assert_eq!(out, seg);
    }

    #[test]
    fn yaw_translation_equivariance() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let bases = [
            dresser(2, 1.0, 0.6, 1.1),
            door_cabinet(HandleSide::Right, 0.8, 0.6, 1.0),
            chest(false, 0.9, 0.6, 0.5),
        ];
        for fx in &bases {
            for _ in 0..5 {
                let yaw = rng.random::<f64>() * std::f64::consts::TAU;
                let t = Vec3::new(
                    rng.random::<f64>() * 4.0 - 2.0,
                    rng.random::<f64>() * 4.0 - 2.0,
                    rng.random::<f64>() * 2.0,
                );
                let moved = fx.transformed(yaw, t);
                let pred =
                    predict_motion(&moved.seg, &moved.mesh, &moved.frame, &MotionTypeStats::default())
                        .unwrap();
                for (got, want) in pred.parts.iter().zip(&moved.seg.parts) {
                    let g = got.motion.as_ref().unwrap();
                    let w = want.motion.as_ref().unwrap();
                    assert!(
                        (g.axis - w.axis).norm() < 1e-6,
                        "{} yaw={yaw}: {:?} vs {:?}",
                        fx.name,
                        g.axis,
                        w.axis
                    );
                    if let (Some(go), Some(wo)) = (g.origin, w.origin) {
                        let d = (go - wo) - (go - wo).dot(&w.axis) * w.axis;
                        assert!(d.norm() < 1e-6, "{} yaw={yaw}", fx.name);
                    }
                }
            }
        }
    }

    #[test]
    fn revolute_origin_on_box_edge() {
        for fx in [
            door_cabinet(HandleSide::Left, 0.8, 0.6, 1.0),
            chest(false, 0.9, 0.6, 0.5),
        ] {
            let pred = predict_motion(&fx.seg, &fx.mesh, &fx.frame, &MotionTypeStats::default())
                .unwrap();
            for p in &pred.parts {
                let m = p.motion.as_ref().unwrap();
                let Some(o) = m.origin else { continue };
                let part_mesh = fx.mesh.submesh(p.triangle_ids.iter().copied());
                let box_ = gravity_obb(&part_mesh.vertices, &fx.frame).unwrap();
                let best = box_edges(&box_)
                    .iter()
                    .map(|&e| point_segment_distance(o, e))
                    .fold(f64::INFINITY, f64::min);
                let diag = box_.half_extents.norm() * 2.0;
                assert!(best < 1e-6 * diag, "{}: {best}", fx.name);
            }
        }
    }
}
