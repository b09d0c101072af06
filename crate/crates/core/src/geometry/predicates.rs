//! Orientation and in-circle tests.
//!
//! Both predicates use adaptive-precision arithmetic (`robust`, a port of
//! Shewchuk's predicates), so the returned sign is exact for any inputs
//! representable as `f64`.

use robust::Coord;

use super::Point2;

/// Exact sign of a geometric determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative = -1,
    Zero = 0,
    Positive = 1,
}

impl Sign {
    fn of(v: f64) -> Self {
        if v > 0.0 {
            Sign::Positive
        } else if v < 0.0 {
            Sign::Negative
        } else {
            Sign::Zero
        }
    }

    pub fn as_i8(self) -> i8 {
        self as i8
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

#[inline]
fn c(p: &Point2) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

/// Sign of the signed area of triangle `abc`; positive when counterclockwise.
pub fn orientation(a: &Point2, b: &Point2, c_: &Point2) -> Sign {
    Sign::of(robust::orient2d(c(a), c(b), c(c_)))
}

/// Positive when `d` lies strictly inside the circle through `a`, `b`, `c`
/// (given counterclockwise), zero when cocircular.
pub fn incircle(a: &Point2, b: &Point2, c_: &Point2, d: &Point2) -> Sign {
    Sign::of(robust::incircle(c(a), c(b), c(c_), c(d)))
}

/// Raw orientation determinant (exact sign, approximate magnitude).
pub fn orient2d_value(a: &Point2, b: &Point2, c_: &Point2) -> f64 {
    robust::orient2d(c(a), c(b), c(c_))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orientation_examples() {
        assert_eq!(orientation(&[0., 0.], &[1., 0.], &[0., 1.]), Sign::Positive);
        assert_eq!(orientation(&[0., 0.], &[1., 1.], &[2., 2.]), Sign::Zero);
        assert_eq!(orientation(&[0., 0.], &[0., 1.], &[1., 0.]), Sign::Negative);
    }

    #[test]
    fn orientation_is_exact_near_degeneracy() {
        // Classic failure case for naive evaluation: nearly collinear points
        // along a line with slope 1 offset by one ulp.
        let a = [0.5, 0.5];
        let b = [12.0, 12.0];
        let c_ = [24.0, 24.0];
        assert_eq!(orientation(&a, &b, &c_), Sign::Zero);
        let d = [0.5 + f64::EPSILON, 0.5];
        assert_eq!(orientation(&d, &b, &c_), Sign::Negative);
    }

    #[test]
    fn incircle_basic() {
        let (a, b, c_) = ([0., 0.], [1., 0.], [0., 1.]);
        assert_eq!(incircle(&a, &b, &c_, &[0.5, 0.5]), Sign::Positive);
        assert_eq!(incircle(&a, &b, &c_, &[1., 1.]), Sign::Zero);
        assert_eq!(incircle(&a, &b, &c_, &[2., 2.]), Sign::Negative);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn pt() -> impl Strategy<Value = Point2> {
            (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(x, y)| [x, y])
        }

        proptest! {
            #[test]
            fn orientation_sign_flips_on_odd_permutation(a in pt(), b in pt(), c_ in pt()) {
                let s = orientation(&a, &b, &c_);
                prop_assert_eq!(orientation(&b, &a, &c_), s.flip());
                prop_assert_eq!(orientation(&a, &c_, &b), s.flip());
                prop_assert_eq!(orientation(&b, &c_, &a), s);
            }

            #[test]
            fn incircle_sign_flips_on_odd_permutation(a in pt(), b in pt(), c_ in pt(), d in pt()) {
                let s = incircle(&a, &b, &c_, &d);
                prop_assert_eq!(incircle(&b, &a, &c_, &d), s.flip());
                prop_assert_eq!(incircle(&b, &c_, &a, &d), s);
            }
        }
    }
}
