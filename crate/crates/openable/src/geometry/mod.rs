//! Core geometric kernel: triangle meshes, oriented boxes, BVH ray casting,
//! and 3D GIoU.

mod bvh;
mod giou;
mod obb;

pub use bvh::{Bvh, RayHit};
#[cfg(test)]
pub use bvh::brute_force_ray_cast;
pub use giou::giou3d;
pub use obb::{gravity_obb, OrientedBox};

use nalgebra::{Point3, Vector3};

pub type Vec3 = Vector3<f64>;
pub type Pt3 = Point3<f64>;

/// Two-vector canonical frame: the object's up and front directions.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Frame {
    pub up: Vec3,
    pub front: Vec3,
}

impl Frame {
    pub fn new(up: Vec3, front: Vec3) -> Self {
        let up = up.normalize();
        let front = front.normalize();
        debug_assert!(up.dot(&front).abs() < 1e-6, "up and front must be orthogonal");
        Frame { up, front }
    }

    /// z-up, x-front; the convention used by the source datasets.
    pub fn canonical() -> Self {
        Frame {
            up: Vec3::new(0.0, 0.0, 1.0),
            front: Vec3::new(1.0, 0.0, 0.0),
        }
    }

    /// The horizontal axis completing a right-handed (right, front, up) triple.
    pub fn right(&self) -> Vec3 {
        self.front.cross(&self.up)
    }
}

/// Indexed triangle mesh with optional per-vertex attributes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Pt3>,
    pub triangles: Vec<[u32; 3]>,
    pub normals: Option<Vec<Vec3>>,
    pub colors: Option<Vec<[f32; 3]>>,
    pub uvs: Option<Vec<[f32; 2]>>,
    pub texture_path: Option<String>,
}

impl TriMesh {
    pub fn new(vertices: Vec<Pt3>, triangles: Vec<[u32; 3]>) -> Self {
        TriMesh {
            vertices,
            triangles,
            ..Default::default()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn triangle_vertices(&self, t: usize) -> [Pt3; 3] {
        let [a, b, c] = self.triangles[t];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(t);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn triangle_areas(&self) -> Vec<f64> {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).collect()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn triangle_centroid(&self, t: usize) -> Pt3 {
        let [a, b, c] = self.triangle_vertices(t);
        Pt3::from((a.coords + b.coords + c.coords) / 3.0)
    }

    /// Unit face normal; zero vector for degenerate triangles.
    pub fn face_normal(&self, t: usize) -> Vec3 {
        let [a, b, c] = self.triangle_vertices(t);
        let n = (b - a).cross(&(c - a));
        let len = n.norm();
        if len > 0.0 {
            n / len
        } else {
            Vec3::zeros()
        }
    }

    /// Area-weighted centroid of the whole surface.
    pub fn surface_centroid(&self) -> Pt3 {
        let mut acc = Vec3::zeros();
        let mut total = 0.0;
        for t in 0..self.triangles.len() {
            let a = self.triangle_area(t);
            acc += self.triangle_centroid(t).coords * a;
            total += a;
        }
        if total > 0.0 {
            Pt3::from(acc / total)
        } else if self.vertices.is_empty() {
            Pt3::origin()
        } else {
            let n = self.vertices.len() as f64;
            Pt3::from(self.vertices.iter().map(|p| p.coords).sum::<Vec3>() / n)
        }
    }

    pub fn aabb(&self) -> Aabb {
        Aabb::from_points(self.vertices.iter().copied())
    }

    /// Check index bounds and degenerate index triples.
    pub fn validate(&self) -> crate::Result<()> {
        let n = self.vertices.len() as u32;
        for (i, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(crate::Error::IndexOutOfRange {
                    index: i,
                    count: self.vertices.len(),
                });
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(crate::Error::Schema(format!(
                    "triangle {i} repeats a vertex index"
                )));
            }
        }
        Ok(())
    }

    /// Append another mesh, remapping its triangle indices. Returns the range
    /// of triangle ids the appended mesh occupies.
    pub fn append(&mut self, other: &TriMesh) -> std::ops::Range<usize> {
        let vbase = self.vertices.len() as u32;
        let tbase = self.triangles.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(
            other
                .triangles
                .iter()
                .map(|t| [t[0] + vbase, t[1] + vbase, t[2] + vbase]),
        );
        merge_attr(&mut self.normals, &other.normals, vbase as usize, other.vertices.len(), Vec3::zeros());
        merge_attr(&mut self.colors, &other.colors, vbase as usize, other.vertices.len(), [0.0; 3]);
        merge_attr(&mut self.uvs, &other.uvs, vbase as usize, other.vertices.len(), [0.0; 2]);
        tbase..self.triangles.len()
    }

    /// Extract the sub-mesh formed by the given triangles (compacted vertices).
    pub fn submesh(&self, triangle_ids: impl IntoIterator<Item = usize>) -> TriMesh {
        let mut remap: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        let mut out = TriMesh::default();
        if self.normals.is_some() {
            out.normals = Some(Vec::new());
        }
        if self.colors.is_some() {
            out.colors = Some(Vec::new());
        }
        if self.uvs.is_some() {
            out.uvs = Some(Vec::new());
        }
        out.texture_path = self.texture_path.clone();
        for t in triangle_ids {
            let tri = self.triangles[t];
            let mut new_tri = [0u32; 3];
            for (k, &v) in tri.iter().enumerate() {
                let nv = *remap.entry(v).or_insert_with(|| {
                    out.vertices.push(self.vertices[v as usize]);
                    if let (Some(dst), Some(src)) = (&mut out.normals, &self.normals) {
                        dst.push(src[v as usize]);
                    }
                    if let (Some(dst), Some(src)) = (&mut out.colors, &self.colors) {
                        dst.push(src[v as usize]);
                    }
                    if let (Some(dst), Some(src)) = (&mut out.uvs, &self.uvs) {
                        dst.push(src[v as usize]);
                    }
                    (out.vertices.len() - 1) as u32
                });
                new_tri[k] = nv;
            }
            out.triangles.push(new_tri);
        }
        out
    }

    /// Rigidly transform all vertices (and normals) in place.
    pub fn transform(&mut self, rotation: &nalgebra::Rotation3<f64>, translation: Vec3) {
        for v in &mut self.vertices {
            *v = rotation * *v + translation;
        }
        if let Some(normals) = &mut self.normals {
            for n in normals {
                *n = rotation * *n;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.vertices {
            v.coords *= s;
        }
    }
}

fn merge_attr<T: Copy>(
    dst: &mut Option<Vec<T>>,
    src: &Option<Vec<T>>,
    dst_len_before: usize,
    src_len: usize,
    fill: T,
) {
    match (dst.as_mut(), src) {
        (None, None) => {}
        (Some(d), Some(s)) => d.extend_from_slice(s),
        (Some(d), None) => d.extend(std::iter::repeat(fill).take(src_len)),
        (None, Some(s)) => {
            let mut d = vec![fill; dst_len_before];
            d.extend_from_slice(s);
            *dst = Some(d);
        }
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Aabb {
    pub min: Pt3,
    pub max: Pt3,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb {
            min: Pt3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY),
            max: Pt3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn new(min: Pt3, max: Pt3) -> Self {
        Aabb { min, max }
    }

    pub fn from_points(points: impl IntoIterator<Item = Pt3>) -> Self {
        let mut b = Aabb::empty();
        for p in points {
            b.grow(p);
        }
        b
    }

    pub fn grow(&mut self, p: Pt3) {
        for k in 0..3 {
            self.min[k] = self.min[k].min(p[k]);
            self.max[k] = self.max[k].max(p[k]);
        }
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        let mut b = *self;
        b.grow(other.min);
        b.grow(other.max);
        b
    }

    pub fn extents(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn center(&self) -> Pt3 {
        Pt3::from((self.min.coords + self.max.coords) * 0.5)
    }

    pub fn diagonal(&self) -> f64 {
        self.extents().norm()
    }

    pub fn volume(&self) -> f64 {
        let e = self.extents();
        if e.x < 0.0 || e.y < 0.0 || e.z < 0.0 {
            0.0
        } else {
            e.x * e.y * e.z
        }
    }

    pub fn is_empty(&self) -> bool {
        (0..3).any(|k| self.min[k] > self.max[k])
    }

    pub fn contains(&self, p: Pt3, tol: f64) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] - tol && p[k] <= self.max[k] + tol)
    }

    pub fn intersection(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: Pt3::new(
                self.min.x.max(other.min.x),
                self.min.y.max(other.min.y),
                self.min.z.max(other.min.z),
            ),
            max: Pt3::new(
                self.max.x.min(other.max.x),
                self.max.y.min(other.max.y),
                self.max.z.min(other.max.z),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_area_and_centroid() {
        let mesh = crate::fixtures::unit_cube();
        assert_eq!(mesh.triangles.len(), 12);
        assert!((mesh.total_area() - 6.0).abs() < 1e-12);
        let c = mesh.surface_centroid();
        assert!((c - Pt3::new(0.5, 0.5, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn submesh_extracts_and_compacts() {
        let mesh = crate::fixtures::unit_cube();
        let sub = mesh.submesh(0..2);
        assert_eq!(sub.triangles.len(), 2);
        assert!(sub.vertices.len() <= 6);
        sub.validate().unwrap();
    }

    #[test]
    fn append_tracks_triangle_range() {
        let mut mesh = crate::fixtures::unit_cube();
        let other = crate::fixtures::unit_cube();
        let range = mesh.append(&other);
        assert_eq!(range, 12..24);
        mesh.validate().unwrap();
    }
}
