//! Adaptive Simpson quadrature with Richardson extrapolation.

/// Stopping rules for [`adaptive_simpson`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_depth: 60,
        }
    }
}

/// Number of equal panels the interval is cut into before refinement starts,
/// so that a symmetric integrand cannot fool the first error estimate.
const INITIAL_PANELS: usize = 8;

/// Integrate `f` over `[a, b]`.
///
/// The integrand must be finite on the closed interval; endpoint
/// singularities have to be removed by a change of variables first.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> f64 {
    if a == b {
        return 0.0;
    }
    let width = (b - a) / INITIAL_PANELS as f64;
    let mut panels = Vec::with_capacity(INITIAL_PANELS);
    let mut coarse = 0.0;
    for i in 0..INITIAL_PANELS {
        let lo = a + width * i as f64;
        let hi = if i + 1 == INITIAL_PANELS {
            b
        } else {
            lo + width
        };
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
        let whole = simpson(lo, hi, flo, fmid, fhi);
        coarse += whole;
        panels.push((lo, hi, flo, fmid, fhi, whole));
    }
    let tol = (opts.rel_tol * coarse.abs()).max(opts.abs_tol) / INITIAL_PANELS as f64;
    panels
        .into_iter()
        .map(|(lo, hi, flo, fmid, fhi, whole)| {
            refine(&f, lo, hi, flo, fmid, fhi, whole, tol, opts.max_depth)
        })
        .sum()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol || m <= a || m >= b {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}
