//! Geometry editing around object interiors: completing drawer cavities with
//! generated bodies, and manufacturing scan-like variants by stripping
//! invisible interior geometry and capping open tops.

use crate::assets::{ArticulatedObject, MotionType, PartLabel};
use crate::fixtures::box_mesh;
use crate::geometry::{Aabb, Bvh, Frame, OrientedBox, Pt3, TriMesh, Vec3};
use crate::{Error, Result};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, HashMap};

/// Probe-ray start offset as a fraction of the object diagonal.
pub const PROBE_EPS_FRAC: f64 = 1e-4;
/// Center depth must exceed the side depths by this factor for a corner drawer.
pub const CORNER_MARGIN: f64 = 1.25;
/// Drawer wall thickness: clamp(2% of min(width, height), 1 mm, 20 mm).
pub const THICKNESS_FRAC: f64 = 0.02;
pub const MIN_THICKNESS: f64 = 1e-3;
pub const MAX_THICKNESS: f64 = 0.02;
/// Positional welding tolerance for connectivity segmentation.
pub const WELD_TOL: f64 = 1e-6;
/// Countertop slab thickness.
pub const COUNTERTOP_THICKNESS: f64 = 0.02;
/// Downward-ray grid resolution per side for top-coverage estimation.
pub const COVERAGE_GRID: usize = 32;
/// A hit counts as "top" when it lands within this fraction of the height
/// below the top plane.
pub const TOP_BAND_FRAC: f64 = 0.1;
/// Coverage below this fraction triggers countertop addition.
pub const COVERAGE_THRESHOLD: f64 = 0.5;

/// Inward depths measured from just behind a drawer front: center ray plus
/// side rays at ±40% of the width. A clamped probe hit nothing and fell back
/// to the object bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthProbe {
    pub d_center: f64,
    pub d_left: f64,
    pub d_right: f64,
    pub clamped: [bool; 3],
}

impl DepthProbe {
    pub fn min_depth(&self) -> f64 {
        self.d_center.min(self.d_left).min(self.d_right)
    }

    pub fn max_side(&self) -> f64 {
        self.d_left.max(self.d_right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrawerKind {
    Standard,
    Corner,
}

/// Distance from `origin` along `dir` to the exit of `bounds`; zero when the
/// ray never enters the box.
fn distance_to_bounds(bounds: &Aabb, origin: Pt3, dir: Vec3) -> f64 {
    let mut t_exit = f64::INFINITY;
    let mut t_enter = f64::NEG_INFINITY;
    for k in 0..3 {
        if dir[k].abs() < 1e-15 {
            if origin[k] < bounds.min[k] || origin[k] > bounds.max[k] {
                return 0.0;
            }
            continue;
        }
        let a = (bounds.min[k] - origin[k]) / dir[k];
        let b = (bounds.max[k] - origin[k]) / dir[k];
        t_enter = t_enter.max(a.min(b));
        t_exit = t_exit.min(a.max(b));
    }
    if t_exit < t_enter {
        0.0
    } else {
        t_exit.max(0.0)
    }
}

/// Cast three rays inward (opposite the box front) from just behind the
/// drawer front: at the face center and at ±40% of the width. Depth is the
/// first hit distance, or the distance to the object bounding box when
/// nothing is behind (clamped).
pub fn probe_drawer_depth(mesh: &TriMesh, front_box: &OrientedBox) -> Result<DepthProbe> {
    if front_box.half_extents.x <= 0.0 || front_box.half_extents.z <= 0.0 {
        return Err(Error::DegenerateBox);
    }
    let bvh = Bvh::build(mesh)?;
    let bounds = mesh.aabb();
    let eps = PROBE_EPS_FRAC * bounds.diagonal();
    let dir = -front_box.front();
    let mut depths = [0.0f64; 3];
    let mut clamped = [false; 3];
    // Order: center, left (-40%), right (+40%).
    let offsets = [0.0, -0.8 * front_box.half_extents.x, 0.8 * front_box.half_extents.x];
    for (i, &r) in offsets.iter().enumerate() {
        let origin =
            front_box.from_local(Vec3::new(r, -front_box.half_extents.y, 0.0)) + dir * eps;
        match bvh.ray_cast_unchecked(origin, dir, 0.0, f64::INFINITY) {
            Some(hit) => depths[i] = hit.distance,
            None => {
                depths[i] = distance_to_bounds(&bounds, origin, dir);
                clamped[i] = true;
            }
        }
    }
    Ok(DepthProbe {
        d_center: depths[0],
        d_left: depths[1],
        d_right: depths[2],
        clamped,
    })
}

/// Corner drawers reach much deeper at the center than at the sides.
pub fn classify_drawer(probe: &DepthProbe) -> DrawerKind {
    if probe.d_center > CORNER_MARGIN * probe.max_side() {
        DrawerKind::Corner
    } else {
        DrawerKind::Standard
    }
}

/// Default wall thickness for a drawer front of the given size.
pub fn default_wall_thickness(front_box: &OrientedBox) -> f64 {
    let w = 2.0 * front_box.half_extents.x;
    let h = 2.0 * front_box.half_extents.z;
    (THICKNESS_FRAC * w.min(h)).clamp(MIN_THICKNESS, MAX_THICKNESS)
}

/// Closed box spanning `[lo, hi]` in the local (right, front, up) coordinates
/// of `frame_box`.
fn local_slab(frame_box: &OrientedBox, lo: Vec3, hi: Vec3) -> TriMesh {
    let mut m = box_mesh(Pt3::from((lo + hi) * 0.5), (hi - lo) * 0.5);
    for v in &mut m.vertices {
        *v = frame_box.from_local(v.coords);
    }
    m
}

/// Closed box with explicit center, orthonormal axes, and half extents.
fn oriented_slab(center: Pt3, axes: [Vec3; 3], half: Vec3) -> TriMesh {
    let mut m = box_mesh(Pt3::origin(), half);
    for v in &mut m.vertices {
        let l = v.coords;
        *v = center + axes[0] * l.x + axes[1] * l.y + axes[2] * l.z;
    }
    m
}

/// Build the missing drawer body behind a front plate: bottom, two sides, and
/// a back wall (standard), or an angled two-panel back reaching into the
/// corner (corner drawer). Slabs are flush with the interior of the front
/// plate and extend inward to the probed depth minus one wall thickness.
pub fn build_drawer_body(
    front_box: &OrientedBox,
    probe: &DepthProbe,
    kind: DrawerKind,
    thickness: f64,
) -> Result<TriMesh> {
    let mut t = thickness;
    if t < 1e-5 {
        log::warn!("wall thickness {t} too small; clamped to {MIN_THICKNESS}");
        t = MIN_THICKNESS;
    }
    let hw = front_box.half_extents.x;
    let hh = front_box.half_extents.z;
    let f0 = -front_box.half_extents.y;
    let side_depth = match kind {
        DrawerKind::Standard => probe.min_depth() - t,
        DrawerKind::Corner => probe.max_side().min(probe.d_center) - t,
    };
    if side_depth < 2.0 * t {
        return Err(Error::DepthTooSmall {
            depth: side_depth,
            thickness: t,
        });
    }
    let mut body = TriMesh::default();
    let d = side_depth;
    // Bottom spans the full width; sides rest on it; the back fits between
    // the sides.
    body.append(&local_slab(
        front_box,
        Vec3::new(-hw, f0 - d, -hh),
        Vec3::new(hw, f0, -hh + t),
    ));
    body.append(&local_slab(
        front_box,
        Vec3::new(-hw, f0 - d, -hh + t),
        Vec3::new(-hw + t, f0, hh),
    ));
    body.append(&local_slab(
        front_box,
        Vec3::new(hw - t, f0 - d, -hh + t),
        Vec3::new(hw, f0, hh),
    ));
    match kind {
        DrawerKind::Standard => {
            body.append(&local_slab(
                front_box,
                Vec3::new(-hw + t, f0 - d + t, -hh + t),
                Vec3::new(hw - t, f0 - d, hh),
            ));
        }
        DrawerKind::Corner => {
            // Two angled panels from each side wall's end to the corner apex
            // at the center depth.
            let dc = probe.d_center - t;
            let apex = Vec3::new(0.0, f0 - dc, 0.0);
            for s in [-1.0, 1.0] {
                let start = Vec3::new(s * (hw - t), f0 - d, 0.0);
                let run = apex - start;
                let len = (run.x * run.x + run.y * run.y).sqrt();
                if len < t {
                    return Err(Error::DepthTooSmall {
                        depth: dc,
                        thickness: t,
                    });
                }
                let dir_local = Vec3::new(run.x / len, run.y / len, 0.0);
                let a1 = front_box.right() * dir_local.x + front_box.front() * dir_local.y;
                let a3 = front_box.up();
                let a2 = a3.cross(&a1);
                let mid = (start + apex) * 0.5 + Vec3::new(0.0, 0.0, t / 2.0);
                body.append(&oriented_slab(
                    front_box.from_local(mid),
                    [a1, a2, a3],
                    Vec3::new(len / 2.0, t / 2.0, hh - t / 2.0),
                ));
            }
        }
    }
    Ok(body)
}

/// Area-weighted mean vertex color of a mesh, when colors are present.
fn mean_color(mesh: &TriMesh) -> Option<[f32; 3]> {
    let colors = mesh.colors.as_ref()?;
    let mut acc = [0.0f64; 3];
    let mut total = 0.0f64;
    for (ti, tri) in mesh.triangles.iter().enumerate() {
        let a = mesh.triangle_area(ti);
        for &v in tri {
            for k in 0..3 {
                acc[k] += a * colors[v as usize][k] as f64 / 3.0;
            }
        }
        total += a;
    }
    if total <= 0.0 {
        return None;
    }
    Some([
        (acc[0] / total) as f32,
        (acc[1] / total) as f32,
        (acc[2] / total) as f32,
    ])
}

/// Area-weighted mean UV, used as the constant texture coordinate of
/// generated geometry so it samples a representative texel of the front.
fn mean_uv(mesh: &TriMesh) -> Option<[f32; 2]> {
    let uvs = mesh.uvs.as_ref()?;
    let mut acc = [0.0f64; 2];
    let mut total = 0.0f64;
    for (ti, tri) in mesh.triangles.iter().enumerate() {
        let a = mesh.triangle_area(ti);
        for &v in tri {
            for k in 0..2 {
                acc[k] += a * uvs[v as usize][k] as f64 / 3.0;
            }
        }
        total += a;
    }
    if total <= 0.0 {
        return None;
    }
    Some([(acc[0] / total) as f32, (acc[1] / total) as f32])
}

/// Orient the box front along the horizontal candidate best aligned with the
/// drawer's slide axis.
fn orient_along(box_: &OrientedBox, axis: Vec3) -> OrientedBox {
    let cands = [
        (box_.front(), box_.half_extents.y, box_.half_extents.x),
        (-box_.front(), box_.half_extents.y, box_.half_extents.x),
        (box_.right(), box_.half_extents.x, box_.half_extents.y),
        (-box_.right(), box_.half_extents.x, box_.half_extents.y),
    ];
    let (front, hf, hr) = cands
        .into_iter()
        .max_by(|a, b| axis.dot(&a.0).partial_cmp(&axis.dot(&b.0)).unwrap())
        .unwrap();
    let up = box_.up();
    OrientedBox {
        center: box_.center,
        axes: [front.cross(&up), front, up],
        half_extents: Vec3::new(hr, hf, box_.half_extents.z),
    }
}

/// Complete every prismatic drawer with a generated interior body; doors,
/// lids, and the base pass through unchanged. A part whose completion fails
/// is logged and left as-is.
pub fn complete_interiors(obj: &ArticulatedObject) -> Result<ArticulatedObject> {
    let mut out = obj.clone();
    for i in 0..out.parts.len() {
        let part = &out.parts[i];
        if part.label != PartLabel::Drawer || part.motion.motion_type != MotionType::Prismatic {
            continue;
        }
        // Probe against everything except the drawer front itself.
        let mut scene = out.base.clone();
        for (j, other) in obj.parts.iter().enumerate() {
            if j != i {
                scene.append(&other.mesh);
            }
        }
        match complete_one(&scene, &out.parts[i].mesh, out.parts[i].motion.axis, &out.frame) {
            Ok(body) => {
                let part = &mut out.parts[i];
                part.mesh.append(&body);
            }
            Err(e) => log::warn!("interior completion skipped for part {i}: {e}"),
        }
    }
    Ok(out)
}

fn complete_one(scene: &TriMesh, front: &TriMesh, axis: Vec3, frame: &Frame) -> Result<TriMesh> {
    let raw = crate::geometry::gravity_obb(&front.vertices, frame)?;
    let front_box = orient_along(&raw, axis);
    let probe = probe_drawer_depth(scene, &front_box)?;
    let kind = classify_drawer(&probe);
    let mut body = build_drawer_body(&front_box, &probe, kind, default_wall_thickness(&front_box))?;
    if let Some(c) = mean_color(front) {
        body.colors = Some(vec![c; body.vertices.len()]);
    }
    if let Some(uv) = mean_uv(front) {
        body.uvs = Some(vec![uv; body.vertices.len()]);
    }
    Ok(body)
}

/// Maximal edge-connected component of a mesh, computed after positional
/// vertex welding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectivitySegment {
    pub id: usize,
    pub triangle_ids: BTreeSet<usize>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn weld_ids(mesh: &TriMesh, tol: f64) -> Vec<u64> {
    let mut table: HashMap<[i64; 3], u64> = HashMap::new();
    let mut next = 0u64;
    mesh.vertices
        .iter()
        .map(|p| {
            let key = [
                (p.x / tol).round() as i64,
                (p.y / tol).round() as i64,
                (p.z / tol).round() as i64,
            ];
            *table.entry(key).or_insert_with(|| {
                let id = next;
                next += 1;
                id
            })
        })
        .collect()
}

/// Split a mesh into edge-connected components: vertices are welded at a
/// small positional tolerance, then triangles sharing an edge are merged.
pub fn connectivity_segments(mesh: &TriMesh) -> Result<Vec<ConnectivitySegment>> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let welded = weld_ids(mesh, WELD_TOL);
    let mut uf = UnionFind::new(mesh.triangles.len());
    let mut edge_owner: HashMap<(u64, u64), usize> = HashMap::new();
    for (ti, tri) in mesh.triangles.iter().enumerate() {
        for k in 0..3 {
            let a = welded[tri[k] as usize];
            let b = welded[tri[(k + 1) % 3] as usize];
            let key = (a.min(b), a.max(b));
            match edge_owner.get(&key) {
                Some(&other) => uf.union(ti, other),
                None => {
                    edge_owner.insert(key, ti);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for ti in 0..mesh.triangles.len() {
        let root = uf.find(ti);
        groups.entry(root).or_default().insert(ti);
    }
    Ok(groups
        .into_values()
        .enumerate()
        .map(|(id, triangle_ids)| ConnectivitySegment { id, triangle_ids })
        .collect())
}

/// Evenly distributed unit directions (Fibonacci sphere lattice).
pub fn fibonacci_directions(n: usize) -> Vec<Vec3> {
    let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

fn view_basis(dir: Vec3) -> (Vec3, Vec3) {
    let helper = if dir.z.abs() < 0.9 {
        Vec3::z()
    } else {
        Vec3::x()
    };
    let u = dir.cross(&helper).normalize();
    let v = dir.cross(&u);
    (u, v)
}

/// Triangles visible in at least one orthographic view of the given
/// directions, at the given image resolution.
fn visible_triangles(
    mesh: &TriMesh,
    dirs: &[Vec3],
    resolution: (usize, usize),
) -> Result<BTreeSet<usize>> {
    let bvh = Bvh::build(mesh)?;
    let bounds = mesh.aabb();
    let center = bounds.center();
    let radius = bounds.diagonal() * 0.5 + 1e-6;
    let (w, h) = resolution;
    let sets: Vec<BTreeSet<usize>> = dirs
        .par_iter()
        .map(|&dir| {
            let (u, v) = view_basis(dir);
            let mut seen = BTreeSet::new();
            for iy in 0..h {
                let sv = (2.0 * (iy as f64 + 0.5) / h as f64 - 1.0) * radius;
                for ix in 0..w {
                    let su = (2.0 * (ix as f64 + 0.5) / w as f64 - 1.0) * radius;
                    let origin = center + dir * (radius * 2.0) + u * su + v * sv;
                    if let Some(hit) =
                        bvh.ray_cast_unchecked(origin, -dir, 0.0, 4.0 * radius + 1.0)
                    {
                        seen.insert(hit.triangle_id as usize);
                    }
                }
            }
            seen
        })
        .collect();
    Ok(sets.into_iter().flatten().collect())
}

/// Remove connectivity segments with no triangle visible from any of `views`
/// orthographic directions on a Fibonacci sphere. Survivors keep their
/// original triangle order.
pub fn strip_interior(mesh: &TriMesh, views: usize, resolution: (usize, usize)) -> Result<TriMesh> {
    if views < 4 {
        return Err(Error::Config(format!(
            "interior stripping needs at least 4 views, got {views}"
        )));
    }
    let segments = connectivity_segments(mesh)?;
    let visible = visible_triangles(mesh, &fibonacci_directions(views), resolution)?;
    let mut keep: BTreeSet<usize> = BTreeSet::new();
    for seg in &segments {
        if seg.triangle_ids.iter().any(|t| visible.contains(t)) {
            keep.extend(seg.triangle_ids.iter().copied());
        }
    }
    Ok(mesh.submesh(keep))
}

/// Fraction of a downward ray grid over the footprint whose first hit lands
/// in the top band of the object (within 10% of the height below the top).
pub fn top_coverage(mesh: &TriMesh, frame: &Frame) -> Result<f64> {
    let bvh = Bvh::build(mesh)?;
    let (r, f, u) = (frame.right(), frame.front, frame.up);
    // Extents in the frame basis.
    let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    for p in &mesh.vertices {
        let c = Vec3::new(p.coords.dot(&r), p.coords.dot(&f), p.coords.dot(&u));
        lo = lo.inf(&c);
        hi = hi.sup(&c);
    }
    let height = hi.z - lo.z;
    let band = hi.z - TOP_BAND_FRAC * height;
    let above = hi.z + 0.5 * height.max(1e-6);
    let n = COVERAGE_GRID;
    let mut covered = 0usize;
    for iy in 0..n {
        let cf = lo.y + (iy as f64 + 0.5) / n as f64 * (hi.y - lo.y);
        for ix in 0..n {
            let cr = lo.x + (ix as f64 + 0.5) / n as f64 * (hi.x - lo.x);
            let origin = Pt3::from(r * cr + f * cf + u * above);
            if let Some(hit) = bvh.ray_cast_unchecked(origin, -u, 0.0, f64::INFINITY) {
                let hz = hit.point.coords.dot(&u);
                if hz >= band {
                    covered += 1;
                }
            }
        }
    }
    Ok(covered as f64 / (n * n) as f64)
}

/// Cap an open-topped object with a countertop slab flush with its top plane.
/// Objects whose top is already mostly covered are returned unchanged.
pub fn add_countertop(mesh: &TriMesh, frame: &Frame) -> Result<TriMesh> {
    if top_coverage(mesh, frame)? >= COVERAGE_THRESHOLD {
        return Ok(mesh.clone());
    }
    let (r, f, u) = (frame.right(), frame.front, frame.up);
    let mut lo = Vec3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut hi = -lo;
    for p in &mesh.vertices {
        let c = Vec3::new(p.coords.dot(&r), p.coords.dot(&f), p.coords.dot(&u));
        lo = lo.inf(&c);
        hi = hi.sup(&c);
    }
    let mid = (lo + hi) * 0.5;
    let center = Pt3::from(
        r * mid.x + f * mid.y + u * (hi.z - COUNTERTOP_THICKNESS * 0.5),
    );
    let half = Vec3::new(
        (hi.x - lo.x) * 0.5,
        (hi.y - lo.y) * 0.5,
        COUNTERTOP_THICKNESS * 0.5,
    );
    let mut out = mesh.clone();
    out.append(&oriented_slab(center, [r, f, u], half));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::ArticulatedPart;
    use crate::fixtures::{box_mesh, dresser, unit_cube};
    use crate::geometry::gravity_obb;

    fn canonical_front_box(center: Pt3, half_w: f64, half_t: f64, half_h: f64) -> OrientedBox {
        // axes (right, front, up) = (-y, +x, +z)
        OrientedBox {
            center,
            axes: [-Vec3::y(), Vec3::x(), Vec3::z()],
            half_extents: Vec3::new(half_w, half_t, half_h),
        }
    }

    #[test]
    fn probe_uniform_back_wall() {
        // Front plate at x in [0.48, 0.5], back wall with interior face at
        // x = -0.02: all three probes travel the same distance.
        let mut mesh = box_mesh(Pt3::new(0.49, 0.0, 0.0), Vec3::new(0.01, 0.3, 0.15));
        mesh.append(&box_mesh(Pt3::new(-0.035, 0.0, 0.0), Vec3::new(0.015, 0.3, 0.15)));
        let fb = canonical_front_box(Pt3::new(0.49, 0.0, 0.0), 0.3, 0.01, 0.15);
        let probe = probe_drawer_depth(&mesh, &fb).unwrap();
        let eps = PROBE_EPS_FRAC * mesh.aabb().diagonal();
        let want = 0.48 - (-0.02) - eps;
        for (d, c) in [
            (probe.d_center, probe.clamped[0]),
            (probe.d_left, probe.clamped[1]),
            (probe.d_right, probe.clamped[2]),
        ] {
            assert!((d - want).abs() < 1e-9, "{d} vs {want}");
            assert!(!c);
        }
        assert_eq!(classify_drawer(&probe), DrawerKind::Standard);
    }

    #[test]
    fn probe_clamps_to_bounds() {
        // Front plate plus a floor extending behind it; rays at mid height
        // hit nothing and clamp to the bounding box.
        let mut mesh = box_mesh(Pt3::new(0.49, 0.0, 0.2), Vec3::new(0.01, 0.3, 0.1));
        mesh.append(&box_mesh(Pt3::new(0.0, 0.0, 0.005), Vec3::new(0.5, 0.3, 0.005)));
        let fb = canonical_front_box(Pt3::new(0.49, 0.0, 0.2), 0.3, 0.01, 0.1);
        let probe = probe_drawer_depth(&mesh, &fb).unwrap();
        let eps = PROBE_EPS_FRAC * mesh.aabb().diagonal();
        let want = 0.48 - eps - (-0.5);
        assert!(probe.clamped.iter().all(|&c| c));
        assert!((probe.d_center - want).abs() < 1e-9, "{} vs {want}", probe.d_center);
    }

    #[test]
    fn probe_corner_cabinet() {
        // Side rays blocked at depth 0.4, center ray runs 0.8 into the
        // corner.
        let fb = canonical_front_box(Pt3::new(0.0, 0.0, 0.0), 0.25, 0.01, 0.1);
        let mut mesh = box_mesh(Pt3::new(0.0, 0.0, 0.0), Vec3::new(0.01, 0.25, 0.1));
        let eps_guess = |m: &TriMesh| PROBE_EPS_FRAC * m.aabb().diagonal();
        // Walls for the side probes (at y = ±0.2) and a deep center wall.
        mesh.append(&box_mesh(Pt3::new(-0.41, -0.2, 0.0), Vec3::new(0.01, 0.05, 0.1)));
        mesh.append(&box_mesh(Pt3::new(-0.41, 0.2, 0.0), Vec3::new(0.01, 0.05, 0.1)));
        mesh.append(&box_mesh(Pt3::new(-0.81, 0.0, 0.0), Vec3::new(0.01, 0.05, 0.1)));
        let probe = probe_drawer_depth(&mesh, &fb).unwrap();
        let eps = eps_guess(&mesh);
        assert!((probe.d_center - (0.8 - 0.01 - eps)).abs() < 1e-9);
        assert!((probe.d_left - (0.4 - 0.01 - eps)).abs() < 1e-9);
        assert!((probe.d_right - (0.4 - 0.01 - eps)).abs() < 1e-9);
        assert_eq!(classify_drawer(&probe), DrawerKind::Corner);
    }

    #[test]
    fn classify_margin_rule() {
        let p = |c, l, r| DepthProbe {
            d_center: c,
            d_left: l,
            d_right: r,
            clamped: [false; 3],
        };
        assert_eq!(classify_drawer(&p(0.5, 0.5, 0.5)), DrawerKind::Standard);
        assert_eq!(classify_drawer(&p(0.8, 0.4, 0.4)), DrawerKind::Corner);
        assert_eq!(classify_drawer(&p(0.5, 0.45, 0.45)), DrawerKind::Standard);
    }

    #[test]
    fn body_slab_dimensions() {
        // Front 0.4 wide x 0.2 tall, depth 0.5, thickness 0.01.
        let fb = canonical_front_box(Pt3::new(0.0, 0.0, 0.0), 0.2, 0.01, 0.1);
        let probe = DepthProbe {
            d_center: 0.5,
            d_left: 0.5,
            d_right: 0.5,
            clamped: [false; 3],
        };
        let body = build_drawer_body(&fb, &probe, DrawerKind::Standard, 0.01).unwrap();
        assert_eq!(body.triangles.len(), 4 * 12);
        // Slab extents (sorted) per 24-vertex block: bottom, left, right, back.
        let expect = [
            [0.01, 0.4, 0.49],
            [0.01, 0.19, 0.49],
            [0.01, 0.19, 0.49],
            [0.01, 0.19, 0.38],
        ];
        for (i, want) in expect.iter().enumerate() {
            let vs = &body.vertices[i * 24..(i + 1) * 24];
            let bb = Aabb::from_points(vs.iter().copied());
            let mut e = [bb.extents().x, bb.extents().y, bb.extents().z];
            e.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut w = *want;
            w.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for k in 0..3 {
                assert!((e[k] - w[k]).abs() < 1e-9, "slab {i}: {e:?} vs {w:?}");
            }
        }
        // Entirely behind the front plate's interior plane.
        assert!(body.vertices.iter().all(|v| v.x <= -0.01 + 1e-9));
    }

    #[test]
    fn body_each_slab_closed() {
        let fb = canonical_front_box(Pt3::origin(), 0.2, 0.01, 0.1);
        let probe = DepthProbe {
            d_center: 0.9,
            d_left: 0.4,
            d_right: 0.4,
            clamped: [false; 3],
        };
        for kind in [DrawerKind::Standard, DrawerKind::Corner] {
            let body = build_drawer_body(&fb, &probe, kind, 0.01).unwrap();
            let nslabs = if kind == DrawerKind::Corner { 5 } else { 4 };
            assert_eq!(body.triangles.len(), nslabs * 12);
            for s in 0..nslabs {
                let slab = body.submesh(s * 12..(s + 1) * 12);
                // After welding, every edge is shared by exactly two
                // triangles.
                let welded = weld_ids(&slab, WELD_TOL);
                let mut counts: HashMap<(u64, u64), usize> = HashMap::new();
                for tri in &slab.triangles {
                    for k in 0..3 {
                        let a = welded[tri[k] as usize];
                        let b = welded[tri[(k + 1) % 3] as usize];
                        *counts.entry((a.min(b), a.max(b))).or_default() += 1;
                    }
                }
                assert!(counts.values().all(|&c| c == 2), "slab {s} not closed");
            }
        }
    }

    #[test]
    fn body_thickness_guards() {
        let fb = canonical_front_box(Pt3::origin(), 0.2, 0.01, 0.1);
        let shallow = DepthProbe {
            d_center: 0.015,
            d_left: 0.015,
            d_right: 0.015,
            clamped: [false; 3],
        };
        assert!(matches!(
            build_drawer_body(&fb, &shallow, DrawerKind::Standard, 0.01),
            Err(Error::DepthTooSmall { .. })
        ));
        // Tiny thickness is clamped to the 1 mm floor, not rejected.
        let ok = DepthProbe {
            d_center: 0.5,
            d_left: 0.5,
            d_right: 0.5,
            clamped: [false; 3],
        };
        let body = build_drawer_body(&fb, &ok, DrawerKind::Standard, 1e-7).unwrap();
        let bb = Aabb::from_points(body.vertices[24..48].iter().copied());
        assert!((bb.extents().y - MIN_THICKNESS).abs() < 1e-9);
    }

    fn dresser_object(n: usize) -> (ArticulatedObject, f64, f64, f64) {
        let (w, d, h) = (1.0, 0.6, 1.1);
        let fx = dresser(n, w, d, h);
        let base = fx.mesh.submesh(fx.seg.base_triangles.iter().copied());
        let parts = fx
            .seg
            .parts
            .iter()
            .map(|p| ArticulatedPart {
                mesh: fx.mesh.submesh(p.triangle_ids.iter().copied()),
                label: p.label,
                motion: p.motion.clone().unwrap(),
            })
            .collect();
        (
            ArticulatedObject {
                base,
                parts,
                frame: fx.frame,
            },
            w,
            d,
            h,
        )
    }

    #[test]
    fn complete_dresser_drawers() {
        let (obj, w, d, h) = dresser_object(3);
        let done = complete_interiors(&obj).unwrap();
        const WALL: f64 = 0.02;
        for (before, after) in obj.parts.iter().zip(&done.parts) {
            // Front triangles preserved bit-exact, body appended.
            assert_eq!(
                &after.mesh.vertices[..before.mesh.vertices.len()],
                &before.mesh.vertices[..]
            );
            assert!(after.mesh.triangles.len() > before.mesh.triangles.len());
            // Generated vertices stay inside the cabinet cavity cross-section
            // and behind the front plate.
            for v in &after.mesh.vertices[before.mesh.vertices.len()..] {
                assert!(v.y.abs() <= w / 2.0 - WALL + 1e-9);
                assert!(v.z >= WALL - 1e-9 && v.z <= h - WALL + 1e-9);
                assert!(v.x <= d / 2.0 + 1e-9);
                assert!(v.x >= -d / 2.0 + WALL - 1e-9);
            }
            // Pulled out along the slide axis by 90% of its depth, the body
            // leaves the cavity without touching the walls laterally.
            let body = Aabb::from_points(
                after.mesh.vertices[before.mesh.vertices.len()..].iter().copied(),
            );
            let depth = body.extents().x;
            let shifted_min = body.min.x + 0.9 * depth;
            assert!(shifted_min > -d / 2.0 + WALL);
        }
    }

    #[test]
    fn doors_only_identity() {
        let fx = crate::fixtures::door_cabinet(crate::fixtures::HandleSide::Right, 0.8, 0.6, 1.0);
        let base = fx.mesh.submesh(fx.seg.base_triangles.iter().copied());
        let obj = ArticulatedObject {
            base,
            parts: fx
                .seg
                .parts
                .iter()
                .map(|p| ArticulatedPart {
                    mesh: fx.mesh.submesh(p.triangle_ids.iter().copied()),
                    label: p.label,
                    motion: p.motion.clone().unwrap(),
                })
                .collect(),
            frame: fx.frame,
        };
        let done = complete_interiors(&obj).unwrap();
        for (a, b) in obj.parts.iter().zip(&done.parts) {
            assert_eq!(a.mesh, b.mesh);
        }
    }

    #[test]
    fn connectivity_counts() {
        let cube = unit_cube();
        assert_eq!(connectivity_segments(&cube).unwrap().len(), 1);

        let mut two = unit_cube();
        two.append(&box_mesh(Pt3::new(5.0, 0.0, 0.0), Vec3::new(0.5, 0.5, 0.5)));
        let segs = connectivity_segments(&two).unwrap();
        assert_eq!(segs.len(), 2);
        assert!(segs.iter().all(|s| s.triangle_ids.len() == 12));
        // Segments partition the mesh.
        let total: usize = segs.iter().map(|s| s.triangle_ids.len()).sum();
        assert_eq!(total, two.triangles.len());
    }

    #[test]
    fn connectivity_welds_shared_face() {
        // Two boxes sharing a full face: welded corner vertices join them
        // into one segment.
        let mut mesh = box_mesh(Pt3::new(0.5, 0.0, 0.0), Vec3::new(0.5, 0.5, 0.5));
        mesh.append(&box_mesh(Pt3::new(1.5, 0.0, 0.0), Vec3::new(0.5, 0.5, 0.5)));
        assert_eq!(connectivity_segments(&mesh).unwrap().len(), 1);
    }

    #[test]
    fn strip_removes_enclosed_cube() {
        let mut mesh = box_mesh(Pt3::origin(), Vec3::new(1.0, 1.0, 1.0));
        mesh.append(&box_mesh(Pt3::origin(), Vec3::new(0.3, 0.3, 0.3)));
        let out = strip_interior(&mesh, 16, (64, 64)).unwrap();
        assert_eq!(out.triangles.len(), 12);
        let bb = out.aabb();
        assert!((bb.extents().x - 2.0).abs() < 1e-12);
    }

    #[test]
    fn strip_convex_identity_and_idempotent() {
        let cube = unit_cube();
        let once = strip_interior(&cube, 16, (64, 64)).unwrap();
        assert_eq!(once.triangles.len(), 12);
        let twice = strip_interior(&once, 16, (64, 64)).unwrap();
        assert_eq!(once.vertices, twice.vertices);
        assert_eq!(once.triangles, twice.triangles);
    }

    #[test]
    fn strip_keeps_visible_shelf() {
        // Open-front cabinet with an interior shelf: the shelf is visible
        // through the opening and must survive.
        let mut mesh = TriMesh::default();
        crate::fixtures::open_front_shell(&mut mesh, 1.0, 0.6, 1.0);
        let shelf = box_mesh(Pt3::new(0.0, 0.0, 0.5), Vec3::new(0.28, 0.47, 0.01));
        let range = mesh.append(&shelf);
        let out = strip_interior(&mesh, 64, (128, 128)).unwrap();
        assert_eq!(out.triangles.len(), mesh.triangles.len());
        // Soundness: every directly visible triangle survives.
        let visible =
            visible_triangles(&mesh, &fibonacci_directions(64), (128, 128)).unwrap();
        assert!(visible.iter().any(|t| range.contains(t)));
    }

    #[test]
    fn strip_view_floor() {
        assert!(matches!(
            strip_interior(&unit_cube(), 3, (8, 8)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn countertop_added_when_open() {
        let mut mesh = TriMesh::default();
        crate::fixtures::open_top_shell(&mut mesh, 1.0, 0.6, 0.8);
        let frame = Frame::canonical();
        assert!(top_coverage(&mesh, &frame).unwrap() < COVERAGE_THRESHOLD);
        let capped = add_countertop(&mesh, &frame).unwrap();
        assert_eq!(capped.triangles.len(), mesh.triangles.len() + 12);
        assert!(top_coverage(&capped, &frame).unwrap() >= 0.95);
        // Slab flush with the top plane.
        let top = capped
            .vertices
            .iter()
            .map(|v| v.z)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((top - 0.8).abs() < 1e-9);
    }

    #[test]
    fn countertop_closed_identity() {
        let cube = unit_cube();
        let out = add_countertop(&cube, &Frame::canonical()).unwrap();
        assert_eq!(out, cube);
    }

    #[test]
    fn completed_body_inherits_mean_color() {
        let (mut obj, ..) = dresser_object(1);
        let n = obj.parts[0].mesh.vertices.len();
        obj.parts[0].mesh.colors = Some(vec![[0.2, 0.4, 0.6]; n]);
        let done = complete_interiors(&obj).unwrap();
        let colors = done.parts[0].mesh.colors.as_ref().unwrap();
        let c = colors[n];
        assert!((c[0] - 0.2).abs() < 1e-6 && (c[1] - 0.4).abs() < 1e-6 && (c[2] - 0.6).abs() < 1e-6);
    }

    #[test]
    fn front_box_orientation_follows_axis() {
        let fx = dresser(1, 1.0, 0.6, 1.1);
        let pm = fx.mesh.submesh(fx.seg.parts[0].triangle_ids.iter().copied());
        let raw = gravity_obb(&pm.vertices, &fx.frame).unwrap();
        let fb = orient_along(&raw, Vec3::x());
        assert!((fb.front() - Vec3::x()).norm() < 1e-9);
        assert!(fb.half_extents.y < fb.half_extents.x);
    }
}
