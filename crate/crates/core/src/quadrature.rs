use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

/// Adaptive Simpson quadrature of `f` over `[a, b]` to relative tolerance
/// `rel_tol` (measured against a coarse estimate of the integral's scale).
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::validation("interval", "integration limits must be finite"));
    }
    if !(rel_tol > 0.0) {
        return Err(Error::validation("rel_tol", "tolerance must be positive"));
    }
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };

    // Scale from the absolute integrand on a coarse grid so cancellation
    // cannot drive the tolerance to zero.
    let n = 16;
    let h = (hi - lo) / n as f64;
    let scale: f64 = (0..=n).map(|k| f(lo + k as f64 * h).abs()).sum::<f64>() * h;
    let eps = rel_tol * scale.max(f64::MIN_POSITIVE);

    let fa = f(lo);
    let fm = f(0.5 * (lo + hi));
    let fb = f(hi);
    let whole = simpson(lo, hi, fa, fm, fb);
    let value = refine(&f, lo, hi, fa, fm, fb, whole, eps, MAX_DEPTH)?;
    Ok(sign * value)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine(f: &impl Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> Result<f64> {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m));
    let frm = f(0.5 * (m + b));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return Err(Error::Numerical(format!("non-finite integrand on [{a}, {b}]")));
    }
    if delta.abs() <= 15.0 * eps {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numerical(format!(
            "adaptive quadrature did not resolve [{a}, {b}] to {eps:.3e}"
        )));
    }
    Ok(refine(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomials_and_exponentials() {
        assert_relative_eq!(adaptive_simpson(|x| x * x * x, 0.0, 2.0, 1e-10).unwrap(), 4.0, max_relative = 1e-14);
        assert_relative_eq!(adaptive_simpson(f64::exp, 0.0, 1.0, 1e-10).unwrap(), 1f64.exp() - 1.0, max_relative = 1e-10);
        assert_relative_eq!(adaptive_simpson(f64::cosh, -3.0, 3.0, 1e-8).unwrap(), 2.0 * 3f64.sinh(), max_relative = 1e-8);
    }

    #[test]
    fn orientation_and_empty_interval() {
        assert_eq!(adaptive_simpson(f64::sin, 1.0, 1.0, 1e-6).unwrap(), 0.0);
        let fwd = adaptive_simpson(f64::sin, 0.0, 2.0, 1e-9).unwrap();
        let bwd = adaptive_simpson(f64::sin, 2.0, 0.0, 1e-9).unwrap();
        assert_eq!(fwd, -bwd);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(adaptive_simpson(f64::sin, 0.0, f64::INFINITY, 1e-6).is_err());
        assert!(adaptive_simpson(f64::sin, 0.0, 1.0, 0.0).is_err());
        assert!(adaptive_simpson(|x| 1.0 / x, 0.0, 1.0, 1e-6).is_err());
    }
}
