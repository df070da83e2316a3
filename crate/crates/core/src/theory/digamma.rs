//! Digamma function ψ₀ for positive real arguments.

use crate::error::{Error, Result};

/// Arguments below this are lifted with ψ(x) = ψ(x + 1) - 1/x.
const LIFT_THRESHOLD: f64 = 6.0;

/// ψ₀(x) for x > 0, absolute error below 1e-10.
///
/// Small arguments are shifted up past 6 with the recurrence, then the
/// asymptotic expansion
/// ψ(x) ~ ln x - 1/(2x) - Σ B₂ₖ / (2k x²ᵏ)
/// is summed through the x⁻¹⁴ term. At x = 6 the first omitted term is
/// below 2e-13.
pub fn digamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(x));
    }
    let mut x = x;
    let mut shift = 0.0;
    while x < LIFT_THRESHOLD {
        shift -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // B₂ₖ / 2k for k = 1..7, applied to x^{-2k} by Horner in 1/x².
    let series = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2
                                * (1.0 / 240.0
                                    - inv2
                                        * (1.0 / 132.0
                                            - inv2 * (691.0 / 32760.0 - inv2 / 12.0))))));
    Ok(shift + x.ln() - 0.5 / x - series)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Euler–Mascheroni constant to 30 digits.
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082;

    #[test]
    fn recurrence() {
        for x in [0.5, 1.0, 3.7, 12.0] {
            let lhs = digamma(x + 1.0).unwrap() - digamma(x).unwrap();
            assert!((lhs - 1.0 / x).abs() <= 1e-10, "x = {x}");
        }
    }

    #[test]
    fn special_values() {
        assert!((digamma(1.0).unwrap() + EULER_GAMMA).abs() <= 1e-10);
        let half = -EULER_GAMMA - 2.0 * std::f64::consts::LN_2;
        assert!((digamma(0.5).unwrap() - half).abs() <= 1e-10);
        assert!((digamma(0.5).unwrap() + 1.963_510_026_0).abs() <= 1e-10);
        // ψ(n) = H_{n-1} - γ
        let h: f64 = (1..20).map(|k| 1.0 / k as f64).sum();
        assert!((digamma(20.0).unwrap() - (h - EULER_GAMMA)).abs() <= 1e-12);
    }

    #[test]
    fn domain() {
        assert!(matches!(digamma(0.0), Err(Error::Domain(_))));
        assert!(digamma(-1.5).is_err());
        assert!(digamma(f64::NAN).is_err());
        assert!(digamma(f64::INFINITY).is_err());
    }
}
