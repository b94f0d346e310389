//! Bracketed root finding: bisection followed by a short Newton polish.

use crate::error::{ModelError, Result};

/// Relative width, with respect to the initial bracket, at which bisection stops.
pub const BISECTION_REL_WIDTH: f64 = 1e-14;
/// Newton steps applied after bisection.
pub const NEWTON_POLISH_STEPS: usize = 3;

/// Find a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` have opposite
/// signs (or one of them is zero).
///
/// When `df` is given, up to [`NEWTON_POLISH_STEPS`] Newton steps refine the
/// bisection midpoint. A step is kept only if it stays inside the final
/// bracket and does not increase `|f|`.
pub fn bisect_newton<F, D>(f: F, df: Option<D>, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.is_finite() && fb.is_finite()) || fa.signum() == fb.signum() {
        return Err(ModelError::Domain(format!(
            "root not bracketed: f({a}) = {fa}, f({b}) = {fb}"
        )));
    }
    let target = BISECTION_REL_WIDTH * (b - a);
    while b - a > target {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    let mut x = 0.5 * (a + b);
    if let Some(df) = df {
        let mut fx = f(x);
        for _ in 0..NEWTON_POLISH_STEPS {
            let d = df(x);
            if d == 0.0 || !d.is_finite() {
                break;
            }
            let next = x - fx / d;
            if !(a..=b).contains(&next) {
                break;
            }
            let fnext = f(next);
            if fnext.abs() > fx.abs() {
                break;
            }
            x = next;
            fx = fnext;
        }
    }
    Ok(x)
}

/// Grow `hi` by doubling from `start` until `pred(hi)` holds.
pub fn expand_until<P: Fn(f64) -> bool>(start: f64, pred: P) -> Result<f64> {
    let mut hi = start.max(f64::MIN_POSITIVE);
    for _ in 0..2100 {
        if pred(hi) {
            return Ok(hi);
        }
        hi *= 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    Err(ModelError::Domain(format!(
        "no bracket found by doubling from {start}"
    )))
}
