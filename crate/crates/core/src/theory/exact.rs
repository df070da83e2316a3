//! Improvement probabilities and the exact expected hitting time.
//!
//! The model follows one improvement of the OneMax value of the active bin
//! at a time. With `kappa_done` bins already complete and `l` zeros of the
//! active bin already turned into ones, a generation improves the active bin
//! when at least one of the λ/2 pool pairs is an elite pair whose swap moves
//! a one into a zero of the active bin. The number of elite members α is
//! modelled as uniform on 1..=μ.

use crate::error::{Error, Result};

use super::{LevelState, ModelParams};

/// Probability that a tournament pool pair consists of two elite members
/// when α of μ members are elite: `(α(2μ - α))² / μ⁴`.
pub fn p_sel(alpha: usize, mu: usize) -> Result<f64> {
    if alpha == 0 || alpha > mu {
        return Err(Error::invalid(format!(
            "alpha must be in 1..={mu}, got {alpha}"
        )));
    }
    let (a, m) = (alpha as f64, mu as f64);
    let x = a * (2.0 * m - a) / (m * m);
    Ok(x * x)
}

/// Probability that swapping one random bit between two elite parents
/// improves the active bin: `(M - 2l)(n + κM + 2l) / (2n²)`.
pub fn p_swap(state: LevelState, params: &ModelParams) -> Result<f64> {
    state.check(params)?;
    Ok(p_swap_raw(state.kappa_done, state.l, params))
}

pub(crate) fn p_swap_raw(kappa: usize, l: usize, params: &ModelParams) -> f64 {
    let n = params.layout.n() as f64;
    let m = params.layout.bin_size() as f64;
    let (k, l) = (kappa as f64, l as f64);
    (m - 2.0 * l) * (n + k * m + 2.0 * l) / (2.0 * n * n)
}

/// Probability that a generation does not improve the active bin:
/// `(1/μ) Σ_α (1 - p_sel(α) p_swap)^{λ/2}`.
pub fn p_fail_level(state: LevelState, params: &ModelParams) -> Result<f64> {
    let swap = p_swap(state, params)?;
    Ok(mean_over_alpha(params, swap, |log_fail| log_fail.exp()))
}

/// `1 - p_fail_level`, computed without cancellation.
///
/// Each term `1 - (1 - p)^h` is evaluated as `-expm1(h · ln_1p(-p))`, which
/// keeps full relative precision when `p · h` is tiny.
pub fn p_success_level(state: LevelState, params: &ModelParams) -> Result<f64> {
    let swap = p_swap(state, params)?;
    Ok(p_success_raw(params, swap))
}

fn p_success_raw(params: &ModelParams, swap: f64) -> f64 {
    mean_over_alpha(params, swap, |log_fail| -log_fail.exp_m1())
}

/// Averages `term(h · ln(1 - p_sel(α) p_swap))` over α = 1..=μ.
fn mean_over_alpha(params: &ModelParams, swap: f64, term: impl Fn(f64) -> f64) -> f64 {
    let half_pool = (params.lambda / 2) as f64;
    let total: f64 = (1..=params.mu)
        .map(|alpha| {
            // alpha is in range by construction
            let p = p_sel(alpha, params.mu).unwrap_or(0.0) * swap;
            term(half_pool * (-p).ln_1p())
        })
        .sum();
    total / params.mu as f64
}

/// Expected generations to complete one bin: the sum of the geometric
/// waiting times `1 / p_success` over the levels `l = 0..M/2`.
pub fn bin_expected_time_exact(kappa_done: usize, params: &ModelParams) -> Result<f64> {
    LevelState::new(kappa_done, 0).check(params)?;
    bin_time_raw(kappa_done, params)
}

fn bin_time_raw(kappa: usize, params: &ModelParams) -> Result<f64> {
    let levels = params.layout.bin_size() / 2;
    (0..levels)
        .map(|l| {
            let p = p_success_raw(params, p_swap_raw(kappa, l, params));
            if p > 0.0 {
                Ok(1.0 / p)
            } else {
                Err(Error::DivergentExpectation {
                    kappa_done: kappa,
                    level: l,
                })
            }
        })
        .sum()
}

/// Which value of the bin index enters the swap probability while a bin is
/// being completed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BinIndexing {
    /// The number of bins already complete, 0..K-1.
    #[default]
    CompletedBins,
    /// The 1-based position of the active bin, 1..K.
    OneBased,
}

/// Exact expected first hitting time: bin times summed over all K bins.
pub fn exact_expected_time(params: &ModelParams) -> Result<f64> {
    exact_expected_time_indexed(params, BinIndexing::CompletedBins)
}

pub fn exact_expected_time_indexed(params: &ModelParams, indexing: BinIndexing) -> Result<f64> {
    let offset = match indexing {
        BinIndexing::CompletedBins => 0,
        BinIndexing::OneBased => 1,
    };
    (0..params.layout.bins())
        .map(|k| bin_time_raw(k + offset, params))
        .sum()
}
