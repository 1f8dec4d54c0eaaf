//! Generalized IoU on axis-aligned 3D boxes: IoU minus the normalized empty
//! volume of the minimal enclosing box. Ranges over [-1, 1].

use super::Aabb;
use crate::{Error, Result};

pub fn giou3d(a: &Aabb, b: &Aabb) -> Result<f64> {
    let va = a.volume();
    let vb = b.volume();
    if va == 0.0 && vb == 0.0 {
        return Err(Error::ZeroVolume);
    }
    let inter = a.intersection(b).volume();
    let union = va + vb - inter;
    let hull = a.union(b).volume();
    let iou = inter / union;
    Ok(iou - (hull - union) / hull)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pt3;

    fn cube(min: [f64; 3], max: [f64; 3]) -> Aabb {
        Aabb::new(Pt3::from(min), Pt3::from(max))
    }

    #[test]
    fn identical_boxes() {
        let a = cube([0.0; 3], [1.0; 3]);
        assert_eq!(giou3d(&a, &a).unwrap(), 1.0);
    }

    #[test]
    fn half_shifted_cube() {
        // intersection 0.5, union 1.5, hull 1.5 → 1/3.
        let a = cube([0.0; 3], [1.0; 3]);
        let b = cube([0.5, 0.0, 0.0], [1.5, 1.0, 1.0]);
        let g = giou3d(&a, &b).unwrap();
        assert!((g - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(g, giou3d(&b, &a).unwrap());
    }

    #[test]
    fn far_apart_approaches_minus_one() {
        let a = cube([0.0; 3], [1.0; 3]);
        let b = cube([101.0, 0.0, 0.0], [102.0, 1.0, 1.0]);
        assert!(giou3d(&a, &b).unwrap() < -0.9);
    }

    #[test]
    fn zero_volume_pair_rejected() {
        let flat = cube([0.0; 3], [1.0, 1.0, 0.0]);
        assert!(matches!(
            giou3d(&flat, &flat),
            Err(crate::Error::ZeroVolume)
        ));
    }

    #[test]
    fn bounded_and_below_iou() {
        let a = cube([0.0; 3], [2.0, 1.0, 1.0]);
        let b = cube([1.0, 0.5, 0.0], [3.0, 2.0, 1.0]);
        let inter = a.intersection(&b).volume();
        let iou = inter / (a.volume() + b.volume() - inter);
        let g = giou3d(&a, &b).unwrap();
        assert!(g <= iou);
        assert!((-1.0..=1.0).contains(&g));
    }
}
