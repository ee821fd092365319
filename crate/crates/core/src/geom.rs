//! Axis-aligned geometry shared by the scene and both field solvers.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

pub type Vec3 = Vector3<f64>;

/// Coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    /// The two remaining axes, in cyclic order (so that `a × b = self`).
    #[inline]
    pub fn others(self) -> (Axis, Axis) {
        match self {
            Axis::X => (Axis::Y, Axis::Z),
            Axis::Y => (Axis::Z, Axis::X),
            Axis::Z => (Axis::X, Axis::Y),
        }
    }

    pub fn unit(self) -> Vec3 {
        let mut v = Vec3::zeros();
        v[self.index()] = 1.0;
        v
    }
}

/// Axis-aligned box `[x0,x1] × [y0,y1] × [z0,z1]`, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl Aabb {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64, z0: f64, z1: f64) -> Self {
        Self {
            min: [x0, y0, z0],
            max: [x1, y1, z1],
        }
    }

    pub fn is_proper(&self) -> bool {
        (0..3).all(|i| {
            self.max[i] > self.min[i] && self.min[i].is_finite() && self.max[i].is_finite()
        })
    }

    #[inline]
    pub fn lo(&self, axis: Axis) -> f64 {
        self.min[axis.index()]
    }

    #[inline]
    pub fn hi(&self, axis: Axis) -> f64 {
        self.max[axis.index()]
    }

    #[inline]
    pub fn extent(&self, axis: Axis) -> f64 {
        self.hi(axis) - self.lo(axis)
    }

    pub fn center(&self) -> Vec3 {
        Vec3::new(
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
            0.5 * (self.min[2] + self.max[2]),
        )
    }

    pub fn volume(&self) -> f64 {
        (0..3).map(|i| self.max[i] - self.min[i]).product()
    }

    /// Axis of the largest extent; ties resolve to the first axis in x, y, z order.
    pub fn longest_axis(&self) -> Axis {
        let mut best = Axis::X;
        for a in [Axis::Y, Axis::Z] {
            if self.extent(a) > self.extent(best) * (1.0 + 1e-12) {
                best = a;
            }
        }
        best
    }

    /// True when the interiors intersect (shared faces do not count).
    pub fn overlaps_interior(&self, other: &Aabb) -> bool {
        let tol = 1e-12 * self.scale().max(other.scale());
        (0..3).all(|i| self.min[i] < other.max[i] - tol && other.min[i] < self.max[i] - tol)
    }

    /// Strictly inside (points on the surface are not inside).
    pub fn contains_strict(&self, p: &Vec3) -> bool {
        (0..3).all(|i| p[i] > self.min[i] && p[i] < self.max[i])
    }

    /// Inside or on the surface.
    pub fn contains_closed(&self, p: &Vec3) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        let mut out = *self;
        for i in 0..3 {
            out.min[i] = out.min[i].min(other.min[i]);
            out.max[i] = out.max[i].max(other.max[i]);
        }
        out
    }

    /// Largest edge length, used as a tolerance scale.
    pub fn scale(&self) -> f64 {
        (0..3)
            .map(|i| (self.max[i] - self.min[i]).abs())
            .fold(0.0, f64::max)
    }

    /// Euclidean distance between the two boxes (0 when touching or overlapping).
    pub fn distance(&self, other: &Aabb) -> f64 {
        let mut d2 = 0.0;
        for i in 0..3 {
            let gap = (other.min[i] - self.max[i])
                .max(self.min[i] - other.max[i])
                .max(0.0);
            d2 += gap * gap;
        }
        d2.sqrt()
    }

    /// Returns the shared face when the boxes touch with positive contact area:
    /// `(normal axis, contact box)`; the contact box is flat along the normal.
    pub fn contact(&self, other: &Aabb) -> Option<(Axis, Aabb)> {
        let tol = 1e-9 * self.scale().min(other.scale());
        for axis in Axis::ALL {
            let i = axis.index();
            let plane = if (self.max[i] - other.min[i]).abs() <= tol {
                self.max[i]
            } else if (other.max[i] - self.min[i]).abs() <= tol {
                self.min[i]
            } else {
                continue;
            };
            let (a, b) = axis.others();
            let mut c = Aabb {
                min: [0.0; 3],
                max: [0.0; 3],
            };
            c.min[i] = plane;
            c.max[i] = plane;
            let mut ok = true;
            for o in [a, b] {
                let j = o.index();
                let lo = self.min[j].max(other.min[j]);
                let hi = self.max[j].min(other.max[j]);
                if hi - lo <= tol {
                    ok = false;
                }
                c.min[j] = lo;
                c.max[j] = hi;
            }
            if ok {
                return Some((axis, c));
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contact_detects_shared_face_only() {
        let a = Aabb::new(0.0, 1.0, 0.0, 1.0, 0.0, 1.0);
        let b = Aabb::new(1.0, 2.0, 0.5, 1.5, 0.0, 1.0);
        let (axis, c) = a.contact(&b).unwrap();
        assert_eq!(axis, Axis::X);
        assert_eq!(c.min, [1.0, 0.5, 0.0]);
        assert_eq!(c.max, [1.0, 1.0, 1.0]);
        // edge contact only
        let e = Aabb::new(1.0, 2.0, 1.0, 2.0, 0.0, 1.0);
        assert!(a.contact(&e).is_none());
        assert!(!a.overlaps_interior(&b));
    }

    #[test]
    fn distance_between_boxes() {
        let a = Aabb::new(0.0, 1.0, 0.0, 1.0, 0.0, 1.0);
        let b = Aabb::new(4.0, 5.0, 5.0, 6.0, 0.0, 1.0);
        assert!((a.distance(&b) - 5.0).abs() < 1e-12);
        assert_eq!(a.distance(&a), 0.0);
    }
}
