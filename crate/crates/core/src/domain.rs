//! Feasible regions and Euclidean projection onto them.

use crate::error::{LabError, Result};
use crate::vector::Vector;

/// Relative slack for membership; the ball projection can land one ulp
/// outside the sphere.
pub const MEMBERSHIP_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    /// `{x : ‖x‖ ≤ radius}`
    Ball { radius: f64, dim: usize },
    /// `[lo, hi]^dim`
    Box { lo: f64, hi: f64, dim: usize },
}

impl Domain {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(LabError::invalid("dim", "must be positive"));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(LabError::invalid("radius", format!("{radius} is not a positive real")));
        }
        Ok(Domain::Ball { radius, dim })
    }

    pub fn unit_ball(dim: usize) -> Result<Self> {
        Self::ball(dim, 1.0)
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        if dim == 0 {
            return Err(LabError::invalid("dim", "must be positive"));
        }
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(LabError::invalid("box", format!("need finite lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Domain::Box { lo, hi, dim })
    }

    pub fn dim(&self) -> usize {
        match *self {
            Domain::Ball { dim, .. } | Domain::Box { dim, .. } => dim,
        }
    }

    /// Characteristic size used to scale the membership tolerance.
    pub fn scale(&self) -> f64 {
        match *self {
            Domain::Ball { radius, .. } => radius,
            Domain::Box { lo, hi, .. } => lo.abs().max(hi.abs()),
        }
    }

    pub fn tolerance(&self) -> f64 {
        MEMBERSHIP_RTOL * self.scale()
    }

    pub fn contains(&self, x: &Vector) -> bool {
        if x.dim() != self.dim() {
            return false;
        }
        let tol = self.tolerance();
        match *self {
            Domain::Ball { radius, .. } => x.norm() <= radius + tol,
            Domain::Box { lo, hi, .. } => x.iter().all(|&v| v >= lo - tol && v <= hi + tol),
        }
    }

    /// Euclidean projection. Points already inside (up to the membership
    /// tolerance) are returned unchanged, which makes the map idempotent
    /// bit for bit.
    pub fn project(&self, y: &Vector) -> Result<Vector> {
        y.ensure_dim(self.dim())?;
        Ok(match *self {
            Domain::Ball { radius, .. } => {
                let norm = y.norm();
                if norm <= radius + self.tolerance() {
                    y.clone()
                } else {
                    y.scaled(radius / norm)
                }
            }
            Domain::Box { lo, hi, .. } => {
                let mut x = y.clone();
                for v in x.as_mut_slice() {
                    *v = v.clamp(lo, hi);
                }
                x
            }
        })
    }

    /// The image of the domain under `x ↦ factor·x`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(LabError::invalid("factor", format!("{factor} is not a positive real")));
        }
        match *self {
            Domain::Ball { radius, dim } => Self::ball(dim, radius * factor),
            Domain::Box { lo, hi, dim } => Self::cube(dim, lo * factor, hi * factor),
        }
    }
}

/// Free-function form of [`Domain::project`].
pub fn project(domain: &Domain, y: &Vector) -> Result<Vector> {
    domain.project(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ball_scales_outside_points() {
        let d = Domain::unit_ball(2).unwrap();
        let p = d.project(&Vector::from_slice(&[2.0, 0.0])).unwrap();
        assert_eq!(p.as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn ball_keeps_interior_points() {
        let d = Domain::unit_ball(2).unwrap();
        let y = Vector::from_slice(&[0.3, 0.4]);
        assert_eq!(d.project(&y).unwrap(), y);
    }

    #[test]
    fn box_clamps() {
        let d = Domain::cube(1, -1.0, 1.0).unwrap();
        let p = d.project(&Vector::scalar(1.7)).unwrap();
        assert_eq!(p.as_slice(), &[1.0]);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let d = Domain::unit_ball(3).unwrap();
        assert_eq!(
            d.project(&Vector::zeros(2)),
            Err(LabError::DimensionMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn rejects_degenerate_domains() {
        assert!(Domain::ball(2, 0.0).is_err());
        assert!(Domain::ball(2, -1.0).is_err());
        assert!(Domain::cube(2, 1.0, 1.0).is_err());
        assert!(Domain::cube(0, -1.0, 1.0).is_err());
    }

    #[test]
    fn scaled_domain() {
        let d = Domain::unit_ball(4).unwrap().scaled(0.5).unwrap();
        assert_eq!(d, Domain::Ball { radius: 0.5, dim: 4 });
        let b = Domain::cube(1, -1.0, 2.0).unwrap().scaled(2.0).unwrap();
        assert_eq!(b, Domain::Box { lo: -2.0, hi: 4.0, dim: 1 });
    }

    fn coords(dim: usize, spread: f64) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-spread..spread, dim)
    }

    fn domains() -> impl Strategy<Value = Domain> {
        prop_oneof![
            (0.1f64..5.0).prop_map(|r| Domain::ball(3, r).unwrap()),
            (-3.0f64..0.0, 0.1f64..3.0).prop_map(|(lo, hi)| Domain::cube(3, lo, hi).unwrap()),
        ]
    }

    proptest! {
        #[test]
        fn projection_is_nonexpansive(d in domains(), x in coords(3, 10.0), y in coords(3, 10.0)) {
            let x = d.project(&Vector::from_vec(x)).unwrap();
            let y = Vector::from_vec(y);
            let p = d.project(&y).unwrap();
            prop_assert!(d.contains(&p));
            prop_assert!(p.dist(&x) <= y.dist(&x) * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn projection_is_idempotent(d in domains(), y in coords(3, 10.0)) {
            let p = d.project(&Vector::from_vec(y)).unwrap();
            prop_assert_eq!(d.project(&p).unwrap(), p);
        }
    }
}
