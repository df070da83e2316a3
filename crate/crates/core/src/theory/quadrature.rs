//! Adaptive quadrature on finite intervals.
//!
//! Backed by the double-exponential (tanh-sinh) rule of the `quadrature`
//! crate, which halves its step size level by level until successive
//! estimates agree.

use crate::error::{Error, Result};

/// Integrates `f` over `[a, b]` to the given relative tolerance.
///
/// A first pass fixes the magnitude of the integral; the second pass asks
/// for an absolute error of `rel_tol` times that magnitude. Fails if the
/// error estimate does not reach the target.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    let rough = quadrature::integrate(&f, a, b, 1e-6);
    let scale = rough.integral.abs().max(f64::MIN_POSITIVE);
    let target = rel_tol * scale;
    let out = quadrature::integrate(&f, a, b, target);
    if !out.integral.is_finite() || out.error_estimate > target {
        return Err(Error::NumericFailure {
            estimate: out.integral,
            error_estimate: out.error_estimate,
        });
    }
    Ok(out.integral)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_integrand() {
        let v = integrate(|_| 2.5, 0.0, 1.0, 1e-8).unwrap();
        assert!((v - 2.5).abs() < 1e-12);
    }

    #[test]
    fn smooth_integrands() {
        let v = integrate(|x: f64| x.exp(), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-10);
        let v = integrate(|x: f64| (-x * x).exp(), 1.0, 4.0, 1e-10).unwrap();
        // (√π/2)(erf 4 - erf 1)
        assert!((v - 0.139_402_778_977_141_92).abs() < 1e-10, "{v}");
    }

    #[test]
    fn empty_interval() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-8).unwrap(), 0.0);
    }
}
