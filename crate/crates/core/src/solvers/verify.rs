//! Numeric global-maximum checks used in place of symbolic certificates.

/// Extra information attached to outcomes the theorems do not certify, and
/// to every grid verification.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagnostics {
    /// Short machine-readable code.
    pub reason: String,
    /// `(z, objective)` samples on a log grid.
    pub numeric_scan: Option<Vec<(f64, f64)>>,
    pub best_candidate: Option<f64>,
}

impl Diagnostics {
    pub fn new(reason: impl Into<String>) -> Self {
        Self {
            reason: reason.into(),
            ..Self::default()
        }
    }
}

/// Result of a grid scan around a candidate maximiser.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMaxCheck {
    pub verified: bool,
    pub diagnostics: Diagnostics,
}

/// Points in each grid scan.
pub const GRID_POINTS: usize = 2000;
/// The scan covers `[z*·10^-SPAN, z*·10^SPAN]`.
pub const GRID_DECADES: f64 = 3.0;
/// Relative slack granted to grid points over the candidate value.
pub const GRID_REL_SLACK: f64 = 1e-9;

/// `n` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}

/// Limit as `z → 0+` of `Σ cᵢ z^{eᵢ}`.
///
/// The most singular term with a nonzero coefficient decides the sign of an
/// infinite limit; otherwise the constant terms survive.
pub fn power_sum_limit_at_zero(terms: &[(f64, f64)]) -> f64 {
    let mut worst: Option<(f64, f64)> = None;
    let mut constant = 0.0;
    for &(c, e) in terms {
        if c == 0.0 {
            continue;
        }
        if e < 0.0 {
            match worst {
                Some((_, we)) if we <= e => {
                    if we == e {
                        let (wc, _) = worst.unwrap();
                        worst = Some((wc + c, e));
                    }
                }
                _ => worst = Some((c, e)),
            }
        } else if e == 0.0 {
            constant += c;
        }
    }
    match worst {
        Some((c, _)) if c > 0.0 => f64::INFINITY,
        Some((c, _)) if c < 0.0 => f64::NEG_INFINITY,
        _ => constant,
    }
}

/// Check that `objective` is maximised at `z_star` among the log grid around
/// it, the analytic `z → 0+` limit and the value `zero_option` of not
/// assembling the team at all.
pub fn grid_global_max<F: Fn(f64) -> f64>(
    objective: F,
    z_star: f64,
    limit_at_zero: f64,
    zero_option: f64,
) -> GlobalMaxCheck {
    let peak = objective(z_star);
    let slack = GRID_REL_SLACK * peak.abs().max(1e-12);
    let span = 10f64.powf(GRID_DECADES);
    let grid = log_grid(z_star / span, z_star * span, GRID_POINTS);
    let scan: Vec<(f64, f64)> = grid.iter().map(|&z| (z, objective(z))).collect();
    let (best_z, best_v) =
        scan.iter()
            .copied()
            .filter(|(_, v)| !v.is_nan())
            .fold(
                (z_star, peak),
                |acc, cur| if cur.1 > acc.1 { cur } else { acc },
            );
    let mut reason = "ok";
    let mut verified = peak.is_finite();
    if !verified {
        reason = "candidate_value_not_finite";
    } else if best_v > peak + slack {
        verified = false;
        reason = "grid_point_exceeds_candidate";
    } else if limit_at_zero > peak + slack {
        verified = false;
        reason = "limit_at_zero_exceeds_candidate";
    } else if zero_option > peak + slack {
        verified = false;
        reason = "zero_size_beats_candidate";
    }
    let best_candidate = if best_v > peak + slack {
        Some(best_z)
    } else if limit_at_zero.max(zero_option) > peak + slack {
        Some(0.0)
    } else {
        Some(z_star)
    };
    GlobalMaxCheck {
        verified,
        diagnostics: Diagnostics {
            reason: reason.into(),
            numeric_scan: Some(scan),
            best_candidate,
        },
    }
}

/// Sample `objective` on `[lo, hi]` for diagnostics, returning the scan and
/// the grid argmax.
pub fn scan(objective: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (Vec<(f64, f64)>, Option<f64>) {
    let samples: Vec<(f64, f64)> = log_grid(lo, hi, GRID_POINTS)
        .into_iter()
        .map(|z| (z, objective(z)))
        .collect();
    let best = samples
        .iter()
        .filter(|(_, v)| v.is_finite())
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|&(z, _)| z);
    (samples, best)
}
