//! Gravity-aligned oriented bounding boxes.
//!
//! Boxes rotate only about the frame's up axis (yaw). The horizontal
//! orientation minimizes footprint area, found with rotating calipers on the
//! convex hull of the horizontal projection. Full PCA boxes would tilt on
//! noisy geometry and break the hinge-line assumptions downstream.

use super::{Frame, Pt3, Vec3};
use crate::{Error, Result};

/// Oriented box with axes ordered (right, front, up); all unit, right-handed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub center: Pt3,
    pub axes: [Vec3; 3],
    pub half_extents: Vec3,
}

impl OrientedBox {
    pub fn right(&self) -> Vec3 {
        self.axes[0]
    }
    pub fn front(&self) -> Vec3 {
        self.axes[1]
    }
    pub fn up(&self) -> Vec3 {
        self.axes[2]
    }

    /// Point coordinates in the box's local (right, front, up) frame.
    pub fn to_local(&self, p: Pt3) -> Vec3 {
        let d = p - self.center;
        Vec3::new(d.dot(&self.axes[0]), d.dot(&self.axes[1]), d.dot(&self.axes[2]))
    }

    pub fn from_local(&self, local: Vec3) -> Pt3 {
        self.center + self.axes[0] * local.x + self.axes[1] * local.y + self.axes[2] * local.z
    }

    pub fn corners(&self) -> [Pt3; 8] {
        let h = self.half_extents;
        let mut out = [Pt3::origin(); 8];
        for (i, c) in out.iter_mut().enumerate() {
            let sx = if i & 1 == 0 { -h.x } else { h.x };
            let sy = if i & 2 == 0 { -h.y } else { h.y };
            let sz = if i & 4 == 0 { -h.z } else { h.z };
            *c = self.from_local(Vec3::new(sx, sy, sz));
        }
        out
    }

    pub fn contains(&self, p: Pt3, tol: f64) -> bool {
        let l = self.to_local(p);
        l.x.abs() <= self.half_extents.x + tol
            && l.y.abs() <= self.half_extents.y + tol
            && l.z.abs() <= self.half_extents.z + tol
    }

    /// Horizontal cross-section area (right extent × front extent).
    pub fn footprint_area(&self) -> f64 {
        4.0 * self.half_extents.x * self.half_extents.y
    }

    pub fn volume(&self) -> f64 {
        8.0 * self.half_extents.x * self.half_extents.y * self.half_extents.z
    }
}

/// Fit a minimal-footprint box rotating only about `frame.up`.
///
/// The front axis is whichever of the rectangle's four horizontal directions
/// best aligns with `frame.front`; ties in footprint area resolve to the
/// smallest yaw in [0°, 90°).
pub fn gravity_obb(points: &[Pt3], frame: &Frame) -> Result<OrientedBox> {
    if points.is_empty() {
        return Err(Error::EmptyInput("gravity_obb needs at least one point"));
    }
    let up = frame.up;
    let u0 = frame.right();
    let v0 = frame.front;

    let planar: Vec<[f64; 2]> = points
        .iter()
        .map(|p| [p.coords.dot(&u0), p.coords.dot(&v0)])
        .collect();
    let hull = convex_hull_2d(&planar);
    let yaw = min_area_rect_yaw(&hull);
    let (sin, cos) = yaw.sin_cos();
    // Horizontal rectangle axes at the chosen yaw, lifted back to 3D.
    let d1 = u0 * cos + v0 * sin;
    let d2 = -u0 * sin + v0 * cos;

    let mut front = d1;
    let mut best = d1.dot(&v0);
    for cand in [-d1, d2, -d2] {
        let a = cand.dot(&v0);
        if a > best {
            best = a;
            front = cand;
        }
    }
    let right = front.cross(&up).normalize();
    let axes = [right, front, up];

    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in points {
        for k in 0..3 {
            let c = p.coords.dot(&axes[k]);
            lo[k] = lo[k].min(c);
            hi[k] = hi[k].max(c);
        }
    }
    let mid = [
        (lo[0] + hi[0]) * 0.5,
        (lo[1] + hi[1]) * 0.5,
        (lo[2] + hi[2]) * 0.5,
    ];
    let center = Pt3::from(axes[0] * mid[0] + axes[1] * mid[1] + axes[2] * mid[2]);
    Ok(OrientedBox {
        center,
        axes,
        half_extents: Vec3::new(
            (hi[0] - lo[0]) * 0.5,
            (hi[1] - lo[1]) * 0.5,
            (hi[2] - lo[2]) * 0.5,
        ),
    })
}

/// Andrew's monotone chain; returns hull in counter-clockwise order.
fn convex_hull_2d(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 2 {
        // All input points identical after dedup handled above; collinear sets
        // can still collapse here — fall back to the extreme pair.
        return vec![pts[0], pts[pts.len() - 1]];
    }
    lower
}

/// Yaw of the minimal-area enclosing rectangle, reduced to [0, π/2).
fn min_area_rect_yaw(hull: &[[f64; 2]]) -> f64 {
    match hull.len() {
        0 | 1 => return 0.0,
        2 => {
            let d = [hull[1][0] - hull[0][0], hull[1][1] - hull[0][1]];
            return reduce_yaw(d[1].atan2(d[0]));
        }
        _ => {}
    }
    let n = hull.len();
    let mut best_area = f64::INFINITY;
    let mut best_yaw = 0.0;
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let ex = b[0] - a[0];
        let ey = b[1] - a[1];
        let len = (ex * ex + ey * ey).sqrt();
        if len == 0.0 {
            continue;
        }
        let (ux, uy) = (ex / len, ey / len);
        let mut min_u = f64::INFINITY;
        let mut max_u = f64::NEG_INFINITY;
        let mut min_v = f64::INFINITY;
        let mut max_v = f64::NEG_INFINITY;
        for &p in hull {
            let pu = p[0] * ux + p[1] * uy;
            let pv = -p[0] * uy + p[1] * ux;
            min_u = min_u.min(pu);
            max_u = max_u.max(pu);
            min_v = min_v.min(pv);
            max_v = max_v.max(pv);
        }
        let area = (max_u - min_u) * (max_v - min_v);
        let yaw = reduce_yaw(uy.atan2(ux));
        let improves = area < best_area - 1e-12
            || (area < best_area + 1e-12 && yaw < best_yaw);
        if improves {
            best_area = area;
            best_yaw = yaw;
        }
    }
    best_yaw
}

fn reduce_yaw(theta: f64) -> f64 {
    let q = std::f64::consts::FRAC_PI_2;
    let mut y = theta % q;
    if y < 0.0 {
        y += q;
    }
    // Rounding can land exactly on π/2; fold it back to 0.
    if (y - q).abs() < 1e-12 {
        y = 0.0;
    }
    y
}
