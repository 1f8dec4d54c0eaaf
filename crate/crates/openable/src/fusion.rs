//! Fusing 2D-view and point-cloud instance predictions into a per-triangle
//! part segmentation, plus label inference for motion-only predictions.

use crate::assets::{
    MotionType, PartInstance, PartLabel, PartSegmentation, PointCloudInstance, ViewPrediction,
};
use crate::geometry::{Aabb, Bvh, Frame, Pt3, TriMesh, Vec3};
use crate::sampling::{triangle_vote, PointLabels, SampledPointCloud, BASE_INSTANCE};
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::BTreeSet;

/// Keep predictions with confidence at or above this unless overridden.
pub const CONFIDENCE_THRESHOLD: f64 = 0.9;

/// Merge masks whose area-weighted IoU exceeds this.
pub const MERGE_IOU: f64 = 0.8;

/// A triangle counts as covered by a mask when at least this fraction of its
/// visible pixels fall inside the mask.
pub const PIXEL_COVERAGE: f64 = 0.5;

/// Cosine cutoff separating "vertical" from "horizontal" (45°).
const VERTICAL_COS: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Simple pinhole camera: position, viewing direction, vertical field of view.
#[derive(Debug, Clone, Copy)]
pub struct PinholeCamera {
    pub position: Pt3,
    pub forward: Vec3,
    pub up: Vec3,
    /// Vertical field of view in radians.
    pub fov_y: f64,
}

impl PinholeCamera {
    pub fn look_at(position: Pt3, target: Pt3, up: Vec3, fov_y: f64) -> Self {
        PinholeCamera {
            position,
            forward: target - position,
            up,
            fov_y,
        }
    }

    fn basis(&self) -> Result<(Vec3, Vec3, Vec3)> {
        if !(self.fov_y > 0.0 && self.fov_y < std::f64::consts::PI) {
            return Err(Error::InvalidCamera(format!("fov_y = {}", self.fov_y)));
        }
        let f = self.forward;
        if f.norm() < 1e-12 {
            return Err(Error::InvalidCamera("zero forward vector".into()));
        }
        let f = f.normalize();
        let r = f.cross(&self.up);
        if r.norm() < 1e-9 {
            return Err(Error::InvalidCamera("up parallel to forward".into()));
        }
        let r = r.normalize();
        let u = r.cross(&f);
        Ok((r, u, f))
    }
}

/// Background sentinel in index maps.
pub const BACKGROUND: u32 = u32::MAX;

/// Per-pixel nearest-triangle image for one view.
#[derive(Debug, Clone)]
pub struct IndexMap {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first; `BACKGROUND` where no geometry is hit.
    pub pixels: Vec<u32>,
}

/// Render triangle-index maps by casting one ray through each pixel center.
pub fn render_index_maps(
    mesh: &TriMesh,
    cameras: &[PinholeCamera],
    width: usize,
    height: usize,
) -> Result<Vec<IndexMap>> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidCamera(format!(
            "resolution {width}x{height}"
        )));
    }
    let bvh = Bvh::build(mesh)?;
    let t_max = mesh.aabb().diagonal() * 4.0 + 1.0;
    cameras
        .iter()
        .map(|cam| {
            let (r, u, f) = cam.basis()?;
            let half_h = (cam.fov_y * 0.5).tan();
            let half_w = half_h * width as f64 / height as f64;
            let pixels: Vec<u32> = (0..height)
                .into_par_iter()
                .flat_map_iter(|y| {
                    let bvh = &bvh;
                    (0..width).map(move |x| {
                        let sx = ((x as f64 + 0.5) / width as f64 * 2.0 - 1.0) * half_w;
                        let sy = (1.0 - (y as f64 + 0.5) / height as f64 * 2.0) * half_h;
                        let dir = (f + r * sx + u * sy).normalize();
                        match bvh.ray_cast_unchecked(cam.position, dir, 0.0, t_max) {
                            Some(hit) => hit.triangle_id,
                            None => BACKGROUND,
                        }
                    })
                })
                .collect();
            Ok(IndexMap {
                width,
                height,
                pixels,
            })
        })
        .collect()
}

/// Three-view rig looking at the object center from the front hemisphere.
pub fn default_camera_rig(bounds: &Aabb, frame: &Frame) -> Vec<PinholeCamera> {
    let center = bounds.center();
    let d = bounds.diagonal().max(1e-6) * 1.8;
    let front = frame.front;
    let up = frame.up;
    let right = frame.right();
    let fov = 50f64.to_radians();
    [
        front * 1.0 + up * 0.25,
        front * 0.8 + right * 0.55 + up * 0.35,
        front * 0.8 - right * 0.55 + up * 0.35,
    ]
    .into_iter()
    .map(|dir| PinholeCamera::look_at(center + dir.normalize() * d, center, up, fov))
    .collect()
}

/// One lifted 2D mask: confidence-filtered and projected onto triangles.
#[derive(Debug, Clone)]
pub struct ViewMask {
    /// Stable identity across input permutations: `view_id/mask_index`.
    pub mask_id: String,
    pub label: PartLabel,
    pub confidence: f64,
    /// (triangle id, pixels of the triangle inside the mask), only for
    /// triangles passing the coverage rule.
    pub covered_triangles: Vec<(u32, u32)>,
}

/// Project a view's masks onto the mesh through its index map. Masks below
/// the confidence threshold are dropped; a triangle joins a mask when at
/// least half of its visible pixels are inside the mask.
pub fn lift_view_masks(
    index_map: &IndexMap,
    prediction: &ViewPrediction,
    threshold: f64,
) -> Result<Vec<ViewMask>> {
    let mut visible: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
    for &t in &index_map.pixels {
        if t != BACKGROUND {
            *visible.entry(t).or_insert(0) += 1;
        }
    }
    let mut out = Vec::new();
    for (k, rec) in prediction.masks.iter().enumerate() {
        if rec.confidence < threshold {
            continue;
        }
        if rec.width != index_map.width || rec.height != index_map.height {
            return Err(Error::ShapeMismatch(format!(
                "mask {}x{} vs index map {}x{}",
                rec.width, rec.height, index_map.width, index_map.height
            )));
        }
        let bitmap = rec.decode()?;
        let mut counts: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        for (i, &inside) in bitmap.iter().enumerate() {
            let t = index_map.pixels[i];
            if inside && t != BACKGROUND {
                *counts.entry(t).or_insert(0) += 1;
            }
        }
        let mut covered: Vec<(u32, u32)> = counts
            .into_iter()
            .filter(|&(t, c)| c as f64 >= PIXEL_COVERAGE * visible[&t] as f64)
            .collect();
        covered.sort_unstable();
        out.push(ViewMask {
            mask_id: format!("{}/{}", prediction.view_id, k),
            label: rec.label,
            confidence: rec.confidence,
            covered_triangles: covered,
        });
    }
    Ok(out)
}

/// Greedily reconcile lifted masks into a triangle partition.
///
/// Masks are processed in descending confidence (ties: ascending mask id).
/// Each mask either merges into an accepted part (area-weighted IoU above
/// [`MERGE_IOU`], union of triangles, higher-confidence label kept) or
/// becomes a new part holding whatever triangles earlier parts have not
/// already claimed.
pub fn reconcile_view_masks(masks: &[ViewMask], mesh: &TriMesh) -> Result<PartSegmentation> {
    let areas = mesh.triangle_areas();
    let area_of = |set: &BTreeSet<usize>| -> f64 { set.iter().map(|&t| areas[t]).sum() };

    let mut order: Vec<&ViewMask> = masks.iter().collect();
    order.sort_by(|a, b| {
        b.confidence
            .partial_cmp(&a.confidence)
            .unwrap()
            .then_with(|| a.mask_id.cmp(&b.mask_id))
    });

    struct Accepted {
        label: PartLabel,
        confidence: f64,
        triangles: BTreeSet<usize>,
    }
    let mut accepted: Vec<Accepted> = Vec::new();
    let mut claimed: BTreeSet<usize> = BTreeSet::new();

    for mask in order {
        let full: BTreeSet<usize> = mask
            .covered_triangles
            .iter()
            .map(|&(t, _)| t as usize)
            .collect();
        if full.is_empty() {
            continue;
        }
        for &t in &full {
            if t >= mesh.triangles.len() {
                return Err(Error::IndexOutOfRange {
                    index: t,
                    count: mesh.triangles.len(),
                });
            }
        }
        // Merge test uses the mask's full triangle set, before any contested
        // triangles are surrendered.
        let mut merged = false;
        for part in accepted.iter_mut() {
            let inter = area_of(&(&full & &part.triangles));
            let union = area_of(&full) + area_of(&part.triangles) - inter;
            if union > 0.0 && inter / union > MERGE_IOU {
                let gained: Vec<usize> =
                    full.iter().copied().filter(|t| !claimed.contains(t)).collect();
                part.triangles.extend(gained.iter().copied());
                claimed.extend(gained);
                // The part was accepted earlier, so its confidence is >= ours
                // and its label wins; keep the max for completeness.
                part.confidence = part.confidence.max(mask.confidence);
                merged = true;
                break;
            }
        }
        if !merged {
            let kept: BTreeSet<usize> =
                full.iter().copied().filter(|t| !claimed.contains(t)).collect();
            if !kept.is_empty() {
                claimed.extend(kept.iter().copied());
                accepted.push(Accepted {
                    label: mask.label,
                    confidence: mask.confidence,
                    triangles: kept,
                });
            }
        }
    }

    let parts = accepted
        .into_iter()
        .enumerate()
        .map(|(i, a)| PartInstance {
            id: format!("part_{i}"),
            label: a.label,
            triangle_ids: a.triangles,
            confidence: a.confidence,
            motion: None,
        })
        .collect();
    PartSegmentation::from_parts(parts, mesh.triangles.len())
}

/// Reconcile point-cloud instance predictions, then vote per triangle.
///
/// Instance pairs with point-set IoU above [`MERGE_IOU`] keep only the
/// higher-confidence one; below it both survive, with shared points going to
/// the higher confidence.
pub fn reconcile_pc_masks(
    instances: &[PointCloudInstance],
    cloud: &SampledPointCloud,
    mesh: &TriMesh,
) -> Result<PartSegmentation> {
    for inst in instances {
        if let Some(&bad) = inst.point_ids.iter().find(|&&p| p >= cloud.len()) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                count: cloud.len(),
            });
        }
    }
    let mut order: Vec<usize> = (0..instances.len()).collect();
    order.sort_by(|&a, &b| {
        instances[b]
            .confidence
            .partial_cmp(&instances[a].confidence)
            .unwrap()
            .then(a.cmp(&b))
    });

    let mut kept: Vec<(usize, BTreeSet<usize>)> = Vec::new();
    let mut claimed: BTreeSet<usize> = BTreeSet::new();
    'next: for idx in order {
        let full: BTreeSet<usize> = instances[idx].point_ids.iter().copied().collect();
        for (_, prev) in &kept {
            let inter = (&full & prev).len() as f64;
            let union = (full.len() + prev.len()) as f64 - inter;
            if union > 0.0 && inter / union > MERGE_IOU {
                continue 'next; // duplicate of a higher-confidence instance
            }
        }
        let mine: BTreeSet<usize> = full.difference(&claimed).copied().collect();
        claimed.extend(mine.iter().copied());
        kept.push((idx, mine));
    }

    let mut per_point = vec![BASE_INSTANCE; cloud.len()];
    let infos = kept
        .iter()
        .enumerate()
        .map(|(ki, (idx, points))| {
            for &p in points {
                per_point[p] = ki as u32;
            }
            crate::sampling::InstanceInfo {
                id: format!("part_{ki}"),
                label: instances[*idx].label,
                confidence: instances[*idx].confidence,
            }
        })
        .collect::<Vec<_>>();

    let mut labeled = cloud.clone();
    labeled.labels = Some(PointLabels {
        instances: infos.clone(),
        per_point,
    });
    let votes = triangle_vote(mesh, &labeled)?;

    let mut tri_sets: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); infos.len()];
    for (t, &inst) in votes.iter().enumerate() {
        if inst != BASE_INSTANCE {
            tri_sets[inst as usize].insert(t);
        }
    }
    let parts = infos
        .into_iter()
        .zip(tri_sets)
        .filter(|(_, tris)| !tris.is_empty())
        .map(|(info, tris)| PartInstance {
            id: info.id,
            label: info.label,
            triangle_ids: tris,
            confidence: info.confidence,
            motion: None,
        })
        .collect();
    PartSegmentation::from_parts(parts, mesh.triangles.len())
}

/// Semantic label for a motion-only instance prediction.
///
/// Prismatic parts are drawers. Revolute parts with a near-vertical axis are
/// doors; with a horizontal axis, a vertical mean surface normal means lid,
/// otherwise door. "Vertical" means within 45° of the frame's up.
pub fn infer_label_from_motion(
    motion_type: MotionType,
    axis: Vec3,
    mean_normal: Vec3,
    frame: &Frame,
) -> Result<PartLabel> {
    if axis.norm() < 1e-9 {
        return Err(Error::InvalidMotion);
    }
    Ok(match motion_type {
        MotionType::Prismatic => PartLabel::Drawer,
        MotionType::Revolute => {
            let axis_vertical = axis.normalize().dot(&frame.up).abs() >= VERTICAL_COS;
            if axis_vertical {
                PartLabel::Door
            } else {
                let n = mean_normal;
                let normal_vertical =
                    n.norm() > 1e-9 && n.normalize().dot(&frame.up).abs() >= VERTICAL_COS;
                if normal_vertical {
                    PartLabel::Lid
                } else {
                    PartLabel::Door
                }
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::ViewMaskRecord;
    use crate::fixtures::{box_mesh, unit_cube};

    fn quad_mesh() -> TriMesh {
        TriMesh::new(
            vec![
                Pt3::new(-1.0, -1.0, 0.0),
                Pt3::new(1.0, -1.0, 0.0),
                Pt3::new(1.0, 1.0, 0.0),
                Pt3::new(-1.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
    }

    #[test]
    fn full_frame_quad() {
        let mesh = quad_mesh();
        // Close enough that the quad overfills the frame.
        let cam = PinholeCamera::look_at(
            Pt3::new(0.0, 0.0, 1.0),
            Pt3::origin(),
            Vec3::y(),
            90f64.to_radians(),
        );
        let maps = render_index_maps(&mesh, &[cam], 32, 32).unwrap();
        assert!(maps[0].pixels.iter().all(|&t| t == 0 || t == 1));
    }

    #[test]
    fn cube_frontal_occlusion() {
        let mesh = unit_cube();
        let cam = PinholeCamera::look_at(
            Pt3::new(0.5, 0.5, 4.0),
            Pt3::new(0.5, 0.5, 0.5),
            Vec3::y(),
            30f64.to_radians(),
        );
        let maps = render_index_maps(&mesh, &[cam], 64, 64).unwrap();
        let seen: std::collections::BTreeSet<u32> = maps[0]
            .pixels
            .iter()
            .copied()
            .filter(|&t| t != BACKGROUND)
            .collect();
        // Only the +z face (last two triangles of grid_box order) is visible.
        assert_eq!(seen, [10u32, 11].into_iter().collect());

        // Occlusion oracle: per-pixel brute force nearest hit.
        let (r, u, f) = cam.basis().unwrap();
        let half = (cam.fov_y * 0.5).tan();
        for (i, &got) in maps[0].pixels.iter().enumerate() {
            let (x, y) = (i % 64, i / 64);
            let sx = ((x as f64 + 0.5) / 64.0 * 2.0 - 1.0) * half;
            let sy = (1.0 - (y as f64 + 0.5) / 64.0 * 2.0) * half;
            let dir = (f + r * sx + u * sy).normalize();
            let want = crate::geometry::brute_force_ray_cast(
                &mesh,
                cam.position,
                dir,
                0.0,
                100.0,
            );
            match want {
                Some(h) => assert_eq!(got, h.triangle_id),
                None => assert_eq!(got, BACKGROUND),
            }
        }
    }

    #[test]
    fn empty_scene_is_background() {
        let mesh = quad_mesh();
        // Camera looking away from the quad.
        let cam = PinholeCamera::look_at(
            Pt3::new(0.0, 0.0, 1.0),
            Pt3::new(0.0, 0.0, 2.0),
            Vec3::y(),
            60f64.to_radians(),
        );
        let maps = render_index_maps(&mesh, &[cam], 8, 8).unwrap();
        assert!(maps[0].pixels.iter().all(|&t| t == BACKGROUND));
    }

    #[test]
    fn bad_camera_rejected() {
        let mesh = quad_mesh();
        let cam = PinholeCamera {
            position: Pt3::origin(),
            forward: Vec3::z(),
            up: Vec3::z(),
            fov_y: 1.0,
        };
        assert!(matches!(
            render_index_maps(&mesh, &[cam], 8, 8),
            Err(Error::InvalidCamera(_))
        ));
    }

    fn map_of(pixels: Vec<u32>, w: usize, h: usize) -> IndexMap {
        IndexMap {
            width: w,
            height: h,
            pixels,
        }
    }

    fn rec(label: PartLabel, conf: f64, bitmap: &[bool], w: usize, h: usize) -> ViewMaskRecord {
        ViewMaskRecord {
            label,
            confidence: conf,
            pixels: ViewMaskRecord::encode(bitmap),
            width: w,
            height: h,
        }
    }

    #[test]
    fn low_confidence_mask_dropped() {
        let map = map_of(vec![0; 16], 4, 4);
        let pred = ViewPrediction {
            view_id: "v0".into(),
            masks: vec![rec(PartLabel::Door, 0.85, &[true; 16], 4, 4)],
        };
        let masks = lift_view_masks(&map, &pred, CONFIDENCE_THRESHOLD).unwrap();
        assert!(masks.is_empty());
    }

    #[test]
    fn background_pixels_ignored() {
        // Triangle 7 in 100 pixels, 3 background pixels inside the mask too.
        let mut pixels = vec![7u32; 100];
        pixels.extend([BACKGROUND; 3]);
        pixels.extend([2u32; 25]); // another triangle, outside the mask
        let map = map_of(pixels, 128, 1);
        let mut bitmap = vec![true; 103];
        bitmap.extend([false; 25]);
        let pred = ViewPrediction {
            view_id: "v0".into(),
            masks: vec![rec(PartLabel::Drawer, 0.95, &bitmap, 128, 1)],
        };
        let masks = lift_view_masks(&map, &pred, CONFIDENCE_THRESHOLD).unwrap();
        assert_eq!(masks[0].covered_triangles, vec![(7, 100)]);
    }

    #[test]
    fn coverage_rule_majority_of_visible_pixels() {
        // Triangle 0 visible in 10 pixels; mask covers only 4 → not covered.
        let map = map_of(vec![0; 10], 10, 1);
        let mut bitmap = vec![true; 4];
        bitmap.extend([false; 6]);
        let pred = ViewPrediction {
            view_id: "v".into(),
            masks: vec![rec(PartLabel::Door, 0.99, &bitmap, 10, 1)],
        };
        let masks = lift_view_masks(&map, &pred, CONFIDENCE_THRESHOLD).unwrap();
        assert!(masks[0].covered_triangles.is_empty());
    }

    #[test]
    fn dimension_mismatch() {
        let map = map_of(vec![0; 16], 4, 4);
        let pred = ViewPrediction {
            view_id: "v".into(),
            masks: vec![rec(PartLabel::Door, 0.95, &[true; 4], 2, 2)],
        };
        assert!(matches!(
            lift_view_masks(&map, &pred, CONFIDENCE_THRESHOLD),
            Err(Error::ShapeMismatch(_))
        ));
    }

    fn mask(id: &str, label: PartLabel, conf: f64, tris: &[u32]) -> ViewMask {
        ViewMask {
            mask_id: id.into(),
            label,
            confidence: conf,
            covered_triangles: tris.iter().map(|&t| (t, 1)).collect(),
        }
    }

    #[test]
    fn identical_masks_merge_keeping_higher_confidence_label() {
        let mesh = unit_cube();
        let tris: Vec<u32> = (0..10).collect();
        let masks = vec![
            mask("a/0", PartLabel::Door, 0.95, &tris),
            mask("b/0", PartLabel::Drawer, 0.92, &tris),
        ];
        let seg = reconcile_view_masks(&masks, &mesh).unwrap();
        assert_eq!(seg.parts.len(), 1);
        assert_eq!(seg.parts[0].label, PartLabel::Door);
        assert_eq!(seg.parts[0].triangle_ids.len(), 10);
        seg.validate(12).unwrap();
    }

    #[test]
    fn contested_triangle_goes_to_higher_confidence() {
        let mesh = unit_cube();
        // IoU = 1/3 < 0.8: two parts; triangle 3 contested.
        let masks = vec![
            mask("a/0", PartLabel::Door, 0.95, &[2, 3]),
            mask("b/0", PartLabel::Drawer, 0.92, &[3, 4]),
        ];
        let seg = reconcile_view_masks(&masks, &mesh).unwrap();
        assert_eq!(seg.parts.len(), 2);
        let door = seg.parts.iter().find(|p| p.label == PartLabel::Door).unwrap();
        let drawer = seg.parts.iter().find(|p| p.label == PartLabel::Drawer).unwrap();
        assert!(door.triangle_ids.contains(&3));
        assert!(!drawer.triangle_ids.contains(&3));
        assert_eq!(drawer.triangle_ids, [4usize].into_iter().collect());
    }

    #[test]
    fn zero_masks_all_base() {
        let mesh = unit_cube();
        let seg = reconcile_view_masks(&[], &mesh).unwrap();
        assert!(seg.parts.is_empty());
        assert_eq!(seg.base_triangles.len(), 12);
    }

    #[test]
    fn order_invariance() {
        let mesh = unit_cube();
        let masks = vec![
            mask("a/0", PartLabel::Door, 0.95, &[0, 1, 2]),
            mask("a/1", PartLabel::Drawer, 0.93, &[2, 3]),
            mask("b/0", PartLabel::Lid, 0.97, &[5, 6, 7]),
        ];
        let seg1 = reconcile_view_masks(&masks, &mesh).unwrap();
        let mut rev = masks.clone();
        rev.reverse();
        let seg2 = reconcile_view_masks(&rev, &mesh).unwrap();
        assert_eq!(seg1, seg2);
    }

    #[test]
    fn area_weighted_iou_uses_area() {
        // Two triangles with very different areas: a big shared triangle
        // pushes IoU over the merge threshold even when the small one differs.
        let mesh = TriMesh::new(
            vec![
                Pt3::new(0.0, 0.0, 0.0),
                Pt3::new(10.0, 0.0, 0.0),
                Pt3::new(0.0, 10.0, 0.0),
                Pt3::new(20.0, 0.0, 0.0),
                Pt3::new(21.0, 0.0, 0.0),
                Pt3::new(20.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [3, 4, 5]],
        );
        let masks = vec![
            mask("a/0", PartLabel::Door, 0.95, &[0]),
            mask("a/1", PartLabel::Door, 0.90, &[0, 1]),
        ];
        // area IoU = 50/50.5 ≈ 0.99 > 0.8 → merged into one part.
        let seg = reconcile_view_masks(&masks, &mesh).unwrap();
        assert_eq!(seg.parts.len(), 1);
        assert_eq!(seg.parts[0].triangle_ids.len(), 2);
    }

    fn pc_inst(label: PartLabel, conf: f64, ids: &[usize]) -> PointCloudInstance {
        PointCloudInstance {
            label,
            confidence: conf,
            point_ids: ids.to_vec(),
        }
    }

    fn cube_cloud() -> (TriMesh, SampledPointCloud) {
        let mesh = box_mesh(Pt3::new(0.5, 0.5, 0.5), Vec3::new(0.5, 0.5, 0.5));
        let cloud = crate::sampling::sample_surface(&mesh, 600, true, 1).unwrap();
        (mesh, cloud)
    }

    #[test]
    fn duplicate_pc_instances_deduplicated() {
        let (mesh, cloud) = cube_cloud();
        let front: Vec<usize> = (0..cloud.len())
            .filter(|&i| cloud.source_triangle[i] < 2)
            .collect();
        let insts = vec![
            pc_inst(PartLabel::Door, 0.95, &front),
            pc_inst(PartLabel::Drawer, 0.91, &front),
        ];
        let seg = reconcile_pc_masks(&insts, &cloud, &mesh).unwrap();
        assert_eq!(seg.parts.len(), 1);
        assert_eq!(seg.parts[0].label, PartLabel::Door);
    }

    #[test]
    fn low_iou_instances_both_kept() {
        let (mesh, cloud) = cube_cloud();
        let a: Vec<usize> = (0..cloud.len())
            .filter(|&i| cloud.source_triangle[i] < 4)
            .collect();
        let b: Vec<usize> = (0..cloud.len())
            .filter(|&i| (3..8).contains(&cloud.source_triangle[i]))
            .collect();
        let insts = vec![
            pc_inst(PartLabel::Door, 0.95, &a),
            pc_inst(PartLabel::Drawer, 0.92, &b),
        ];
        let seg = reconcile_pc_masks(&insts, &cloud, &mesh).unwrap();
        assert_eq!(seg.parts.len(), 2);
        seg.validate(mesh.triangles.len()).unwrap();
        // Shared triangle 3's points went to the higher-confidence door.
        let door = seg.parts.iter().find(|p| p.label == PartLabel::Door).unwrap();
        assert!(door.triangle_ids.contains(&3));
    }

    #[test]
    fn single_instance_half_cloud() {
        let (mesh, cloud) = cube_cloud();
        let half: Vec<usize> = (0..cloud.len())
            .filter(|&i| cloud.source_triangle[i] < 6)
            .collect();
        let seg =
            reconcile_pc_masks(&[pc_inst(PartLabel::Lid, 0.99, &half)], &cloud, &mesh).unwrap();
        assert_eq!(seg.parts.len(), 1);
        assert_eq!(seg.parts[0].triangle_ids, (0..6).collect());
        assert_eq!(seg.base_triangles, (6..12).collect());
    }

    #[test]
    fn motion_label_rules() {
        let f = Frame::canonical();
        assert_eq!(
            infer_label_from_motion(MotionType::Prismatic, Vec3::y(), Vec3::x(), &f).unwrap(),
            PartLabel::Drawer
        );
        assert_eq!(
            infer_label_from_motion(MotionType::Revolute, Vec3::z(), Vec3::x(), &f).unwrap(),
            PartLabel::Door
        );
        // Horizontal axis + vertical mean normal → lid.
        assert_eq!(
            infer_label_from_motion(MotionType::Revolute, Vec3::y(), Vec3::z(), &f).unwrap(),
            PartLabel::Lid
        );
        // Horizontal axis + horizontal normal → door.
        assert_eq!(
            infer_label_from_motion(MotionType::Revolute, Vec3::y(), Vec3::x(), &f).unwrap(),
            PartLabel::Door
        );
        assert!(infer_label_from_motion(MotionType::Revolute, Vec3::zeros(), Vec3::x(), &f)
            .is_err());
    }
}
