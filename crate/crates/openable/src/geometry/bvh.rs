//! Bounding volume hierarchy over mesh triangles with watertight ray casting.
//!
//! Intersection uses the shear-and-scale formulation with inclusive edge
//! tests, so rays cannot slip between triangles that share an edge.

use super::{Aabb, Pt3, TriMesh, Vec3};
use crate::{Error, Result};

/// A single ray-triangle intersection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub distance: f64,
    pub triangle_id: u32,
    pub point: Pt3,
}

#[derive(Debug, Clone)]
struct Node {
    bounds: Aabb,
    /// Leaf: (first, count) into `tri_order`. Inner: left child is `first`,
    /// right child is `first + 1`, count == 0.
    first: u32,
    count: u32,
}

/// Immutable spatial index over a mesh; safe for concurrent queries.
#[derive(Debug, Clone)]
pub struct Bvh {
    nodes: Vec<Node>,
    tri_order: Vec<u32>,
    /// Triangle vertices in `tri_order`, flattened for cache locality.
    tris: Vec<[Pt3; 3]>,
}

const LEAF_SIZE: usize = 4;

impl Bvh {
    pub fn build(mesh: &TriMesh) -> Result<Self> {
        if mesh.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let n = mesh.triangles.len();
        let centroids: Vec<Pt3> = (0..n).map(|t| mesh.triangle_centroid(t)).collect();
        let boxes: Vec<Aabb> = (0..n)
            .map(|t| Aabb::from_points(mesh.triangle_vertices(t)))
            .collect();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(2 * n);
        nodes.push(Node {
            bounds: Aabb::empty(),
            first: 0,
            count: 0,
        });
        build_recursive(&mut nodes, 0, &mut order, 0, n, &centroids, &boxes);
        let tris = order
            .iter()
            .map(|&t| mesh.triangle_vertices(t as usize))
            .collect();
        Ok(Bvh {
            nodes,
            tri_order: order,
            tris,
        })
    }

    /// Nearest intersection with distance in `[t_min, t_max]`.
    pub fn ray_cast(
        &self,
        origin: Pt3,
        direction: Vec3,
        t_min: f64,
        t_max: f64,
    ) -> Result<Option<RayHit>> {
        let norm = direction.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDirection(norm));
        }
        debug_assert!(t_min >= 0.0 && t_min < t_max);
        Ok(self.ray_cast_unchecked(origin, direction, t_min, t_max))
    }

    /// As `ray_cast` but skips the unit-direction check (hot loops).
    pub fn ray_cast_unchecked(
        &self,
        origin: Pt3,
        direction: Vec3,
        t_min: f64,
        t_max: f64,
    ) -> Option<RayHit> {
        let ray = WatertightRay::new(origin, direction);
        let inv_dir = Vec3::new(1.0 / direction.x, 1.0 / direction.y, 1.0 / direction.z);
        let mut best: Option<(f64, u32)> = None;
        let mut limit = t_max;
        let mut stack: Vec<u32> = vec![0];
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx as usize];
            if !slab_test(&node.bounds, origin, inv_dir, t_min, limit) {
                continue;
            }
            if node.count > 0 {
                let first = node.first as usize;
                for i in first..first + node.count as usize {
                    if let Some(t) = ray.intersect(&self.tris[i]) {
                        if t >= t_min && t <= limit && best.map_or(true, |(bt, _)| t < bt) {
                            best = Some((t, self.tri_order[i]));
                            limit = t;
                        }
                    }
                }
            } else {
                stack.push(node.first);
                stack.push(node.first + 1);
            }
        }
        best.map(|(t, id)| RayHit {
            distance: t,
            triangle_id: id,
            point: origin + direction * t,
        })
    }

    /// Whether the ray hits anything in `[t_min, t_max]` (early-out).
    pub fn ray_hits(&self, origin: Pt3, direction: Vec3, t_min: f64, t_max: f64) -> bool {
        self.ray_cast_unchecked(origin, direction, t_min, t_max).is_some()
    }

    pub fn bounds(&self) -> Aabb {
        self.nodes[0].bounds
    }

    /// Triangle (id) whose surface is closest to `p`, with the closest point.
    pub fn nearest_triangle(&self, p: Pt3) -> Option<(u32, Pt3, f64)> {
        let mut best: Option<(u32, Pt3, f64)> = None;
        let mut stack: Vec<u32> = vec![0];
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx as usize];
            let lower = aabb_dist2(&node.bounds, p);
            if let Some((_, _, d)) = best {
                if lower >= d * d {
                    continue;
                }
            }
            if node.count > 0 {
                let first = node.first as usize;
                for i in first..first + node.count as usize {
                    let q = closest_point_on_triangle(&self.tris[i], p);
                    let d = (q - p).norm();
                    if best.map_or(true, |(_, _, bd)| d < bd) {
                        best = Some((self.tri_order[i], q, d));
                    }
                }
            } else {
                stack.push(node.first);
                stack.push(node.first + 1);
            }
        }
        best
    }
}

fn build_recursive(
    nodes: &mut Vec<Node>,
    node_idx: usize,
    order: &mut [u32],
    offset: usize,
    len: usize,
    centroids: &[Pt3],
    boxes: &[Aabb],
) {
    let slice = &mut order[offset..offset + len];
    let mut bounds = Aabb::empty();
    for &t in slice.iter() {
        bounds = bounds.union(&boxes[t as usize]);
    }
    if len <= LEAF_SIZE {
        nodes[node_idx] = Node {
            bounds,
            first: offset as u32,
            count: len as u32,
        };
        return;
    }
    let mut cb = Aabb::empty();
    for &t in slice.iter() {
        cb.grow(centroids[t as usize]);
    }
    let ext = cb.extents();
    let axis = if ext.x >= ext.y && ext.x >= ext.z {
        0
    } else if ext.y >= ext.z {
        1
    } else {
        2
    };
    let mid = len / 2;
    slice.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .partial_cmp(&centroids[b as usize][axis])
            .unwrap()
            .then(a.cmp(&b))
    });
    let left = nodes.len();
    nodes.push(Node {
        bounds: Aabb::empty(),
        first: 0,
        count: 0,
    });
    nodes.push(Node {
        bounds: Aabb::empty(),
        first: 0,
        count: 0,
    });
    nodes[node_idx] = Node {
        bounds,
        first: left as u32,
        count: 0,
    };
    build_recursive(nodes, left, order, offset, mid, centroids, boxes);
    build_recursive(nodes, left + 1, order, offset + mid, len - mid, centroids, boxes);
}

fn slab_test(b: &Aabb, origin: Pt3, inv_dir: Vec3, t_min: f64, t_max: f64) -> bool {
    let mut lo = t_min;
    let mut hi = t_max;
    for k in 0..3 {
        let t0 = (b.min[k] - origin[k]) * inv_dir[k];
        let t1 = (b.max[k] - origin[k]) * inv_dir[k];
        let (t0, t1) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
        // NaN from 0 * inf means the ray is parallel inside the slab; keep it.
        if t0.is_finite() {
            lo = lo.max(t0);
        }
        if t1.is_finite() {
            hi = hi.min(t1);
        } else if origin[k] < b.min[k] || origin[k] > b.max[k] {
            return false;
        }
    }
    lo <= hi
}

fn aabb_dist2(b: &Aabb, p: Pt3) -> f64 {
    let mut d2 = 0.0;
    for k in 0..3 {
        let d = if p[k] < b.min[k] {
            b.min[k] - p[k]
        } else if p[k] > b.max[k] {
            p[k] - b.max[k]
        } else {
            0.0
        };
        d2 += d * d;
    }
    d2
}

/// Precomputed shear transform for watertight triangle intersection.
struct WatertightRay {
    origin: Pt3,
    kx: usize,
    ky: usize,
    kz: usize,
    sx: f64,
    sy: f64,
    sz: f64,
}

impl WatertightRay {
    fn new(origin: Pt3, dir: Vec3) -> Self {
        let ax = dir.x.abs();
        let ay = dir.y.abs();
        let az = dir.z.abs();
        let kz = if az >= ax && az >= ay {
            2
        } else if ay >= ax {
            1
        } else {
            0
        };
        let mut kx = (kz + 1) % 3;
        let mut ky = (kx + 1) % 3;
        if dir[kz] < 0.0 {
            std::mem::swap(&mut kx, &mut ky);
        }
        WatertightRay {
            origin,
            kx,
            ky,
            kz,
            sx: dir[kx] / dir[kz],
            sy: dir[ky] / dir[kz],
            sz: 1.0 / dir[kz],
        }
    }

    fn intersect(&self, tri: &[Pt3; 3]) -> Option<f64> {
        let a = tri[0] - self.origin;
        let b = tri[1] - self.origin;
        let c = tri[2] - self.origin;

        let ax = a[self.kx] - self.sx * a[self.kz];
        let ay = a[self.ky] - self.sy * a[self.kz];
        let bx = b[self.kx] - self.sx * b[self.kz];
        let by = b[self.ky] - self.sy * b[self.kz];
        let cx = c[self.kx] - self.sx * c[self.kz];
        let cy = c[self.ky] - self.sy * c[self.kz];

        let u = cx * by - cy * bx;
        let v = ax * cy - ay * cx;
        let w = bx * ay - by * ax;

        if (u < 0.0 || v < 0.0 || w < 0.0) && (u > 0.0 || v > 0.0 || w > 0.0) {
            return None;
        }
        let det = u + v + w;
        if det == 0.0 {
            return None;
        }
        let az = self.sz * a[self.kz];
        let bz = self.sz * b[self.kz];
        let cz = self.sz * c[self.kz];
        let t = (u * az + v * bz + w * cz) / det;
        if t >= 0.0 {
            Some(t)
        } else {
            None
        }
    }
}

fn closest_point_on_triangle(tri: &[Pt3; 3], p: Pt3) -> Pt3 {
    // Ericson, Real-Time Collision Detection, 5.1.5.
    let [a, b, c] = *tri;
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let denom = d1 - d3;
        let v = if denom != 0.0 { d1 / denom } else { 0.0 };
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let denom = d2 - d6;
        let w = if denom != 0.0 { d2 / denom } else { 0.0 };
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let denom = (d4 - d3) + (d5 - d6);
        let w = if denom != 0.0 { (d4 - d3) / denom } else { 0.0 };
        return b + (c - b) * w;
    }
    let denom = va + vb + vc;
    if denom == 0.0 {
        return a;
    }
    let v = vb / denom;
    let w = vc / denom;
    a + ab * v + ac * w
}

/// Brute-force nearest hit over every triangle. Reference oracle for tests.
#[cfg(test)]
pub fn brute_force_ray_cast(
    mesh: &TriMesh,
    origin: Pt3,
    direction: Vec3,
    t_min: f64,
    t_max: f64,
) -> Option<RayHit> {
    let ray = WatertightRay::new(origin, direction);
    let mut best: Option<RayHit> = None;
    for (id, _) in mesh.triangles.iter().enumerate() {
        let tri = mesh.triangle_vertices(id);
        if let Some(t) = ray.intersect(&tri) {
            if t >= t_min && t <= t_max && best.map_or(true, |h| t < h.distance) {
                best = Some(RayHit {
                    distance: t,
                    triangle_id: id as u32,
                    point: origin + direction * t,
                });
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_triangle_centroid_hit() {
        let mesh = TriMesh::new(
            vec![
                Pt3::new(0.0, 0.0, 0.0),
                Pt3::new(1.0, 0.0, 0.0),
                Pt3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2]],
        );
        let bvh = Bvh::build(&mesh).unwrap();
        let hit = bvh
            .ray_cast(Pt3::new(1.0 / 3.0, 1.0 / 3.0, -1.0), Vec3::z(), 0.0, 10.0)
            .unwrap()
            .unwrap();
        assert_eq!(hit.triangle_id, 0);
        assert!((hit.distance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_mesh_rejected() {
        assert!(matches!(
            Bvh::build(&TriMesh::default()),
            Err(crate::Error::EmptyMesh)
        ));
    }

    #[test]
    fn non_unit_direction_rejected() {
        let mesh = crate::fixtures::unit_cube();
        let bvh = Bvh::build(&mesh).unwrap();
        assert!(matches!(
            bvh.ray_cast(Pt3::origin(), Vec3::new(0.0, 0.0, 2.0), 0.0, 1.0),
            Err(crate::Error::InvalidDirection(_))
        ));
    }

    #[test]
    fn cube_face_hits() {
        let mesh = crate::fixtures::unit_cube();
        let bvh = Bvh::build(&mesh).unwrap();
        let hit = bvh
            .ray_cast(Pt3::new(0.5, 0.5, -1.0), Vec3::z(), 0.0, 10.0)
            .unwrap()
            .unwrap();
        assert!((hit.distance - 1.0).abs() < 1e-12);
        // t_min past the near face: the far face at distance 2 is returned.
        let far = bvh
            .ray_cast(Pt3::new(0.5, 0.5, -1.0), Vec3::z(), 1.5, 10.0)
            .unwrap()
            .unwrap();
        assert!((far.distance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_outside_ray_misses() {
        let mesh = TriMesh::new(
            vec![
                Pt3::new(0.0, 0.0, 0.0),
                Pt3::new(1.0, 0.0, 0.0),
                Pt3::new(1.0, 1.0, 0.0),
                Pt3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        );
        let bvh = Bvh::build(&mesh).unwrap();
        let hit = bvh
            .ray_cast(Pt3::new(-1.0, 0.5, 1.0), Vec3::x(), 0.0, 100.0)
            .unwrap();
        assert!(hit.is_none());
    }

    #[test]
    fn random_soup_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 2000;
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for i in 0..n {
            let c = Pt3::new(rng.random::<f64>(), rng.random::<f64>(), rng.random::<f64>());
            for _ in 0..3 {
                vertices.push(c + Vec3::new(
                    rng.random::<f64>() - 0.5,
                    rng.random::<f64>() - 0.5,
                    rng.random::<f64>() - 0.5,
                ) * 0.2);
            }
            triangles.push([3 * i, 3 * i + 1, 3 * i + 2]);
        }
        let mesh = TriMesh::new(vertices, triangles);
        let bvh = Bvh::build(&mesh).unwrap();
        for _ in 0..300 {
            let origin = Pt3::new(
                rng.random::<f64>() * 2.0 - 0.5,
                rng.random::<f64>() * 2.0 - 0.5,
                rng.random::<f64>() * 2.0 - 0.5,
            );
            let dir = Vec3::new(
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
                rng.random::<f64>() - 0.5,
            )
            .normalize();
            let got = bvh.ray_cast(origin, dir, 0.0, 100.0).unwrap();
            let want = brute_force_ray_cast(&mesh, origin, dir, 0.0, 100.0);
            match (got, want) {
                (None, None) => {}
                (Some(g), Some(w)) => {
                    assert!((g.distance - w.distance).abs() <= 1e-9 * w.distance.max(1.0));
                }
                (g, w) => panic!("mismatch: {g:?} vs {w:?}"),
            }
        }
    }

    #[test]
    fn nearest_triangle_on_cube() {
        let mesh = crate::fixtures::unit_cube();
        let bvh = Bvh::build(&mesh).unwrap();
        let (_, q, d) = bvh.nearest_triangle(Pt3::new(0.5, 0.5, 2.0)).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!((q.z - 1.0).abs() < 1e-12);
    }
}
