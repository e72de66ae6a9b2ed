//! Bracketing routines shared by the solver and the band search.

use alloc::format;

use crate::{Error, Result};

pub(crate) const MAX_ITERATIONS: usize = 200;

/// Root of a non-decreasing `f` on `[lo, hi]`, given `f(lo) < 0 < f(hi)`.
///
/// Returns the midpoint of the final bracket once it is narrower than `tol`.
/// Every new evaluation is checked against the bracket values; a decrease
/// beyond `slack` is reported as a numerical error.
pub(crate) fn bisect_non_decreasing<F>(
    routine: &'static str,
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    slack: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return Err(Error::Numerical {
            routine,
            detail: format!("no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"),
        });
    }
    for _ in 0..MAX_ITERATIONS {
        if hi - lo <= tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid < f_lo - slack || f_mid > f_hi + slack {
            return Err(Error::Numerical {
                routine,
                detail: format!(
                    "function not monotone: f({lo}) = {f_lo}, f({mid}) = {f_mid}, f({hi}) = {f_hi}"
                ),
            });
        }
        if f_mid > 0.0 {
            hi = mid;
            f_hi = f_mid;
        } else {
            lo = mid;
            f_lo = f_mid;
        }
    }
    Err(Error::Numerical {
        routine,
        detail: format!(
            "no convergence after {MAX_ITERATIONS} iterations, bracket [{lo}, {hi}] wider than {tol}"
        ),
    })
}

/// Smallest point (to within `tol`) of `[lo, hi]` where a monotone predicate
/// turns true, given `pred(lo) == false` and `pred(hi) == true`.
pub(crate) fn bisect_predicate<P>(
    routine: &'static str,
    mut pred: P,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Result<f64>
where
    P: FnMut(f64) -> Result<bool>,
{
    for _ in 0..MAX_ITERATIONS {
        if hi - lo <= tol {
            return Ok(hi);
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Err(Error::Numerical {
        routine,
        detail: format!("no convergence after {MAX_ITERATIONS} iterations on [{lo}, {hi}]"),
    })
}

/// Minimum of a convex `f` on `[a, b]` by golden-section search.
pub(crate) fn golden_min<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = 0.5 * (libm::sqrt(5.0) - 1.0);
    let (lo0, hi0) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..MAX_ITERATIONS {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    // the minimum of a convex function may sit on the boundary
    for x in [lo0, hi0] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_root() {
        let r = bisect_non_decreasing("t", |x| x * x * x - 2.0, 0.0, 2.0, 1e-12, 0.0).unwrap();
        assert!((r - libm::cbrt(2.0)).abs() < 1e-11);
    }

    #[test]
    fn bisection_requires_sign_change() {
        let e = bisect_non_decreasing("t", |x| x + 1.0, 0.0, 2.0, 1e-9, 0.0).unwrap_err();
        assert!(e.is_numerical());
    }

    #[test]
    fn bisection_detects_non_monotone() {
        // negative at both ends of the first midpoint test
        let f = |x: f64| if x == 1.0 { 5.0 } else { x - 1.5 };
        assert!(bisect_non_decreasing("t", f, 0.0, 2.0, 1e-9, 0.0).is_err());
    }

    #[test]
    fn bisection_reports_non_convergence() {
        let e = bisect_non_decreasing("t", |x| x, -1.0, 1.0, 0.0, 0.0).unwrap_err();
        assert!(matches!(e, Error::Numerical { .. }));
    }

    #[test]
    fn predicate_bisection() {
        let x = bisect_predicate("t", |x| Ok(x >= 0.3), 0.0, 1.0, 1e-9).unwrap();
        assert!((x - 0.3).abs() < 1e-8);
    }

    #[test]
    fn golden_section_interior_and_boundary() {
        let (x, fx) = golden_min(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-6 && fx < 1e-12);
        let (x, _) = golden_min(|x| x, 0.0, 1.0, 1e-10);
        assert_eq!(x, 0.0);
    }
}
