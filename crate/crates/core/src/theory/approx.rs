//! The approximation chain from the exact sum to a closed form.
//!
//! 1. `(1 - x)^{λ/2} ≈ e^{-λx/2}` turns the failure probability into
//!    `(1/μ) Σ_α exp(-(α(2μ - α))² / γ)`, with
//!    `γ = 4μ⁴n² / (λ(M - 2l)(n + κM + 2l))`.
//! 2. The sum over α becomes the integral `I₁ = ∫₁^μ exp(-(α(2μ-α))²/γ) dα`,
//!    expanded to first order around α = 1.
//! 3. The per-level waiting times are summed over `l`, then rescaled to
//!    `l ∈ [0, 1]` (the integral `I₂`) and evaluated at a single point,
//!    which gives a closed form per bin.
//! 4. For large `n` and μ = λ the per-bin closed form reduces to a simple
//!    reciprocal, and the sum over bins telescopes through the digamma
//!    function.
//!
//! Every step needs μ ≥ 2; the closed forms also need M ≥ 4.

use crate::error::{Error, Result};
use crate::problem::RoyalRoadLayout;

use super::digamma::digamma;
use super::quadrature::integrate;
use super::{LevelState, ModelParams};

/// Relative tolerance of the quadrature oracles.
pub const QUADRATURE_REL_TOL: f64 = 1e-8;

/// `γ = 4μ⁴n² / (λ(M - 2l)(n + κM + 2l))`, defined for `l < M/2`.
pub fn gamma_factor(state: LevelState, params: &ModelParams) -> Result<f64> {
    state.check(params)?;
    let m = params.layout.bin_size();
    if 2 * state.l >= m {
        return Err(Error::DivisionByZero(
            "gamma is undefined once the active bin is full",
        ));
    }
    let (n, m) = (params.layout.n() as f64, m as f64);
    let (k, l) = (state.kappa_done as f64, state.l as f64);
    Ok(gamma_scale(params) / ((m - 2.0 * l) * (n + k * m + 2.0 * l)))
}

/// `4μ⁴n² / λ`, the numerator shared by every γ.
fn gamma_scale(params: &ModelParams) -> f64 {
    let mu = params.mu as f64;
    let n = params.layout.n() as f64;
    4.0 * mu.powi(4) * n * n / params.lambda as f64
}

/// First-order Taylor value of `I₁` around α = 1:
/// `e^{-(2μ-1)²/γ} (μ - 1) [1 - 2(2μ - 1)(μ - 1)² / γ]`.
pub fn i1_approx(mu: usize, gamma: f64) -> f64 {
    let mu = mu as f64;
    let d = 2.0 * mu - 1.0;
    (-d * d / gamma).exp() * (mu - 1.0) * (1.0 - 2.0 * d * (mu - 1.0).powi(2) / gamma)
}

/// `∫₁^μ exp(-(α(2μ - α))² / γ) dα` by adaptive quadrature.
pub fn i1_quadrature(mu: usize, gamma: f64) -> Result<f64> {
    if gamma <= 0.0 {
        return Err(Error::invalid("gamma must be positive"));
    }
    let m = mu as f64;
    integrate(
        |a| {
            let x = a * (2.0 * m - a);
            (-x * x / gamma).exp()
        },
        1.0,
        m,
        QUADRATURE_REL_TOL,
    )
}

/// A probability estimate that may have been clipped into [0, 1].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClampedProbability {
    pub value: f64,
    pub clamped: bool,
}

impl ClampedProbability {
    fn clamp(raw: f64) -> Self {
        let value = raw.clamp(0.0, 1.0);
        Self {
            value,
            clamped: value != raw,
        }
    }
}

/// Approximate failure probability `I₁ / μ`, clamped to [0, 1].
pub fn p_fail_approx(state: LevelState, params: &ModelParams) -> Result<ClampedProbability> {
    require_population(params)?;
    let gamma = gamma_factor(state, params)?;
    Ok(ClampedProbability::clamp(
        i1_approx(params.mu, gamma) / params.mu as f64,
    ))
}

/// Expected waiting time at one level, as a function of γ:
/// `γ / (γ - γe + 2(2μ - 1)(μ - 1)² e)` with `e = exp(-(2μ - 1)²/γ)`.
pub fn level_time_at_gamma(mu: usize, gamma: f64) -> f64 {
    let m = mu as f64;
    let d = 2.0 * m - 1.0;
    let e = (-d * d / gamma).exp();
    gamma / (gamma - gamma * e + 2.0 * d * (m - 1.0).powi(2) * e)
}

/// Per-bin sum of [`level_time_at_gamma`] over the levels `l = 0..M/2`.
pub fn bin_time_level_sum(kappa_done: usize, params: &ModelParams) -> Result<f64> {
    require_population(params)?;
    (0..params.layout.bin_size() / 2)
        .map(|l| {
            let gamma = gamma_factor(LevelState::new(kappa_done, l), params)?;
            Ok(level_time_at_gamma(params.mu, gamma))
        })
        .sum()
}

/// γ after rescaling the level index onto `t ∈ [0, 1]`:
/// `4μ⁴n² / (λ(M - 2(M/2 - 1)t)(n + κM + (M/2 - 1)t))`.
pub fn rescaled_gamma(t: f64, kappa_done: usize, params: &ModelParams) -> f64 {
    let n = params.layout.n() as f64;
    let m = params.layout.bin_size() as f64;
    let k = kappa_done as f64;
    let span = m / 2.0 - 1.0;
    gamma_scale(params) / ((m - 2.0 * span * t) * (n + k * m + span * t))
}

/// `I₂ = ∫₀¹ level_time(γ(t)) dt` by adaptive quadrature.
pub fn i2_quadrature(kappa_done: usize, params: &ModelParams) -> Result<f64> {
    require_closed_form_domain(params)?;
    LevelState::new(kappa_done, 0).check(params)?;
    integrate(
        |t| level_time_at_gamma(params.mu, rescaled_gamma(t, kappa_done, params)),
        0.0,
        1.0,
        QUADRATURE_REL_TOL,
    )
}

/// Closed-form expected time to complete a bin:
///
/// `4μ⁴n²(M/2 - 1) / (λ(M/2 + 1)σ₂ [c/σ₁ + G/σ₂ - G/(σ₂σ₁)])`
///
/// where `c = 2(2μ - 1)(μ - 1)²`, `G = 4μ⁴n² / (λ(M/2 + 1))`,
/// `σ₂ = M/2 + n + κM - 1` and `σ₁ = exp(λ(2μ - 1)²(M/2 + 1)σ₂ / (4μ⁴n²))`.
pub fn bin_time_closed_form(kappa_done: usize, params: &ModelParams) -> Result<f64> {
    require_closed_form_domain(params)?;
    LevelState::new(kappa_done, 0).check(params)?;
    let mu = params.mu as f64;
    let n = params.layout.n() as f64;
    let m = params.layout.bin_size() as f64;
    let k = kappa_done as f64;
    let d = 2.0 * mu - 1.0;
    let scale = gamma_scale(params);

    let sigma2 = m / 2.0 + n + k * m - 1.0;
    let sigma1 = (d * d * (m / 2.0 + 1.0) * sigma2 / scale).exp();
    let c = 2.0 * d * (mu - 1.0).powi(2);
    let g = scale / (m / 2.0 + 1.0);
    let bracket = c / sigma1 + g / sigma2 - g / (sigma2 * sigma1);
    Ok(scale * (m / 2.0 - 1.0) / ((m / 2.0 + 1.0) * sigma2 * bracket))
}

/// The `σ₁ → 1` limit of [`bin_time_closed_form`]:
/// `2μ⁴n²(M - 2) / (λ(M + 2)(2μ - 1)(μ - 1)² σ₂)`.
pub fn bin_time_limit(kappa_done: usize, params: &ModelParams) -> Result<f64> {
    require_closed_form_domain(params)?;
    LevelState::new(kappa_done, 0).check(params)?;
    let n = params.layout.n() as f64;
    let m = params.layout.bin_size() as f64;
    let sigma2 = m / 2.0 + n + kappa_done as f64 * m - 1.0;
    Ok(approx_prefactor(params) / sigma2)
}

/// `2μ⁴n²(M - 2) / (λ(M + 2)(2μ - 1)(μ - 1)²)`.
fn approx_prefactor(params: &ModelParams) -> f64 {
    let mu = params.mu as f64;
    let n = params.layout.n() as f64;
    let m = params.layout.bin_size() as f64;
    2.0 * mu.powi(4) * n * n * (m - 2.0)
        / (params.lambda as f64 * (m + 2.0) * (2.0 * mu - 1.0) * (mu - 1.0).powi(2))
}

/// `Σ_{k=0}^{count-1} 1 / (a + k·step)` through the digamma function:
/// `(ψ(a/step + count) - ψ(a/step)) / step`.
pub fn reciprocal_progression_sum(a: f64, step: f64, count: usize) -> Result<f64> {
    let x = a / step;
    Ok((digamma(x + count as f64)? - digamma(x)?) / step)
}

/// Approximate expected first hitting time: the limit bin times summed over
/// all bins, `prefactor · Σ_κ 1/(M/2 + n - 1 + κM)`, telescoped with ψ.
pub fn approx_expected_time(params: &ModelParams) -> Result<f64> {
    require_closed_form_domain(params)?;
    let n = params.layout.n() as f64;
    let m = params.layout.bin_size() as f64;
    let a = m / 2.0 + n - 1.0;
    Ok(approx_prefactor(params) * reciprocal_progression_sum(a, m, params.layout.bins())?)
}

/// `n² log(1 + KM/(M + n)) / M`, the growth order of the hitting time once
/// the population terms cancel (μ = λ).
pub fn asymptotic_scale(layout: &RoyalRoadLayout) -> f64 {
    let n = layout.n() as f64;
    let m = layout.bin_size() as f64;
    let km = (layout.bins() * layout.bin_size()) as f64;
    n * n * (km / (m + n)).ln_1p() / m
}

fn require_population(params: &ModelParams) -> Result<()> {
    if params.mu < 2 {
        return Err(Error::invalid("the approximation needs mu >= 2"));
    }
    Ok(())
}

fn require_closed_form_domain(params: &ModelParams) -> Result<()> {
    require_population(params)?;
    if params.layout.bin_size() < 4 {
        return Err(Error::DegeneratePrefactor(params.layout.bin_size()));
    }
    Ok(())
}
