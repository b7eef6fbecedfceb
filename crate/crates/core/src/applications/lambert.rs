use crate::error::{Error, Result};

/// Principal branch of the Lambert W function on `[0, ∞)`.
///
/// Newton iteration on `w·e^w - y`, kept inside a bracket that shrinks with
/// every residual sign; a step leaving the bracket is replaced by bisection.
pub fn lambert_w(y: f64) -> Result<f64> {
    if y.is_nan() || y < 0.0 {
        return Err(Error::LambertDomain(y));
    }
    if y == 0.0 || y.is_infinite() {
        return Ok(y);
    }
    let (mut lo, mut hi) = (0.0, if y <= 1.0 { 1.0 } else { y.ln() + 1.0 });
    let mut w = if y < 3.0 { (1.0 + y).ln() * 0.75 } else { y.ln() - y.ln().ln() };
    w = w.clamp(lo, hi);
    for _ in 0..200 {
        let ew = w.exp();
        let f = w * ew - y;
        if f > 0.0 {
            hi = w;
        } else {
            lo = w;
        }
        let mut next = w - f / (ew * (w + 1.0));
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - w).abs() <= 4.0 * f64::EPSILON * (1.0 + w) {
            return Ok(next);
        }
        w = next;
    }
    Ok(w)
}
