//! Scalar gain optimization by golden-section search.

use crate::error::{CvfidError, Result};

/// Width below which the bracketing interval is considered converged.
const INTERVAL_TOL: f64 = 1e-8;
/// Points of the coarse scan that locates the unimodal neighborhood before
/// the golden-section refinement.
const SCAN_POINTS: usize = 33;

/// Default search bracket for feedback gains; the analytic optima all lie in
/// `[0, 1]`, the margin guards against edge maxima.
pub const DEFAULT_GAIN_BRACKET: (f64, f64) = (0.0, 2.0);

/// Maximizes `f` on `[lo, hi]` and returns `(argmax, max)`.
///
/// `f` is assumed unimodal on the bracket; a coarse scan first narrows the
/// bracket to the neighborhood of the best sample, then golden-section
/// iterations shrink it below `1e-8`. Non-finite evaluations abort.
pub fn optimize_gain<F>(mut f: F, bracket: (f64, f64)) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (lo, hi) = bracket;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(CvfidError::invalid_parameter(
            "bracket",
            format!("invalid interval [{lo}, {hi}]"),
        ));
    }
    let mut eval = |x: f64| -> Result<f64> {
        let y = f(x)?;
        if !y.is_finite() {
            return Err(CvfidError::NonFinite {
                context: "objective evaluation",
            });
        }
        Ok(y)
    };

    // Coarse scan.
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let mut best_idx = 0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..SCAN_POINTS {
        let x = lo + i as f64 * step;
        let y = eval(x)?;
        if y > best_val {
            best_val = y;
            best_idx = i;
        }
    }
    let mut a = lo + step * best_idx.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_idx + 1) as f64).min(hi);

    // Golden-section refinement.
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > INTERVAL_TOL {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        }
    }
    let (x_best, f_best) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
    if f_best >= best_val {
        Ok((x_best, f_best))
    } else {
        Ok((lo + step * best_idx as f64, best_val))
    }
}
