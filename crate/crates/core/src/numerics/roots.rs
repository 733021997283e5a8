//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Sub-intervals of `[lo, hi]` (split into `n` equal steps) whose endpoint
/// values change sign. Exact zeros at a sample open a bracket on both sides.
pub fn scan_brackets<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut x0 = lo;
    let mut f0 = f(lo);
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + (hi - lo) * i as f64 / n as f64 };
        let f1 = f(x1);
        if f0 == 0.0 || f0.signum() != f1.signum() && f1 != 0.0 {
            out.push((x0, x1));
        }
        x0 = x1;
        f0 = f1;
    }
    out
}

/// Bisection safeguarded secant iteration on a sign-changing bracket.
/// Terminates when the bracket is narrower than `xtol` or a zero is hit.
pub fn bisect_secant<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, xtol: f64, context: &str) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if !(fa.signum() != fb.signum()) || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoRoot {
            context: context.to_string(),
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    for _ in 0..400 {
        let width = (b - a).abs();
        if width <= xtol {
            break;
        }
        let mid = 0.5 * (a + b);
        let sec = b - fb * (b - a) / (fb - fa);
        let use_secant = sec.is_finite() && sec > a.min(b) && sec < a.max(b);
        let x = if use_secant { sec } else { mid };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // Force a bisection if the secant step failed to halve the bracket.
        if (b - a).abs() > 0.5 * width {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm == 0.0 {
                return Ok(m);
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}
