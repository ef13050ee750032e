//! Special functions, adaptive quadrature and bracketed root finding.

mod quad;
mod roots;
mod special;

pub use quad::{integrate, integrate_pieces, integrate_to_infinity, QuadEstimate};
pub use roots::find_root;
pub use special::{erf, erf_inv, erfc, erfc_inv, log_gamma, reg_lower_gamma, reg_upper_gamma};
pub(crate) use special::ln_gamma_unchecked;

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Convergence controls shared by the iterative routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64, max_iter: usize) -> Result<Self> {
        if !(rel > 0.0) {
            return Err(Error::Domain(format!("tolerance rel must be > 0, got {rel}")));
        }
        if !(abs >= 0.0) {
            return Err(Error::Domain(format!("tolerance abs must be >= 0, got {abs}")));
        }
        if max_iter < 1 {
            return Err(Error::Domain("tolerance max_iter must be >= 1".into()));
        }
        Ok(Self { rel, abs, max_iter })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs: 0.0,
            max_iter: 2000,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tolerance_invariants() {
        assert!(Tolerance::new(0.0, 0.0, 1).is_err());
        assert!(Tolerance::new(1e-3, -1.0, 1).is_err());
        assert!(Tolerance::new(1e-3, 0.0, 0).is_err());
        assert!(Tolerance::new(1e-3, 0.0, 1).is_ok());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn erf_is_odd(x in -6.0f64..6.0) {
            prop_assert_eq!(erf(-x), -erf(x));
        }

        #[test]
        fn erf_is_monotone(x in -6.0f64..6.0, dx in 1e-6f64..1.0) {
            prop_assert!(erf(x + dx) >= erf(x));
        }

        #[test]
        fn erf_inv_round_trip(x in -3.0f64..3.0) {
            let back = erf_inv(erf(x)).unwrap();
            prop_assert!((back - x).abs() <= 1e-9, "x={} back={}", x, back);
        }

        #[test]
        fn erf_of_erf_inv(p in -0.999_999f64..0.999_999) {
            prop_assert!((erf(erf_inv(p).unwrap()) - p).abs() <= 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn integrate_is_linear(
            c in proptest::collection::vec(-5.0f64..5.0, 4),
            d in proptest::collection::vec(-5.0f64..5.0, 4),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
        ) {
            let poly = |k: &[f64], x: f64| k.iter().rev().fold(0.0, |acc, v| acc * x + v);
            let tol = Tolerance::new(1e-12, 1e-13, 200).unwrap();
            let f = |x: f64| poly(&c, x);
            let g = |x: f64| poly(&d, x);
            let lhs = integrate(|x| alpha * f(x) + beta * g(x), -1.0, 2.0, tol).unwrap();
            let rhs = alpha * integrate(f, -1.0, 2.0, tol).unwrap()
                + beta * integrate(g, -1.0, 2.0, tol).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        }

        #[test]
        fn find_root_residual(shift in -5.0f64..5.0, scale in 0.1f64..10.0) {
            let tol = Tolerance::new(1e-14, 1e-12, 200).unwrap();
            let f = |x: f64| scale * (x - shift).powi(3) + (x - shift);
            let r = find_root(f, -10.0, 10.0, tol).unwrap();
            prop_assert!(f(r).abs() <= 1e-12 || (r - shift).abs() <= 1e-12);
        }
    }
}
