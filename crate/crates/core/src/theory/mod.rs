//! Expected first hitting time of the optimum, from the probability model of
//! single improvement steps.
//!
//! * [`exact`]: per-level success probabilities and the exact sum of
//!   geometric waiting times over all levels and bins.
//! * [`approx`]: the exponential/integral approximation chain, its closed
//!   forms and the asymptotic growth scale, with quadrature oracles.
//! * [`digamma`] and [`quadrature`]: numerical building blocks.

pub mod approx;
pub mod digamma;
pub mod exact;
pub mod quadrature;

pub use approx::{
    approx_expected_time, asymptotic_scale, bin_time_closed_form, bin_time_level_sum,
    bin_time_limit, gamma_factor, i1_approx, i1_quadrature, i2_quadrature, p_fail_approx,
    reciprocal_progression_sum, ClampedProbability,
};
pub use digamma::digamma;
pub use exact::{
    bin_expected_time_exact, exact_expected_time, exact_expected_time_indexed, p_fail_level, p_sel,
    p_success_level, p_swap, BinIndexing,
};

use crate::engine::validate_sizes;
use crate::error::{Error, Result};
use crate::problem::RoyalRoadLayout;

/// Layout plus population and pool sizes. The elite count α is taken to be
/// uniform on 1..=μ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelParams {
    pub layout: RoyalRoadLayout,
    pub mu: usize,
    pub lambda: usize,
}

impl ModelParams {
    pub fn new(layout: RoyalRoadLayout, mu: usize, lambda: usize) -> Result<Self> {
        validate_sizes(mu, lambda)?;
        Ok(Self { layout, mu, lambda })
    }
}

/// Progress of the model: `kappa_done` complete bins and `l` improvements
/// in the active bin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LevelState {
    pub kappa_done: usize,
    pub l: usize,
}

impl LevelState {
    pub fn new(kappa_done: usize, l: usize) -> Self {
        Self { kappa_done, l }
    }

    pub(crate) fn check(self, params: &ModelParams) -> Result<()> {
        let layout = &params.layout;
        if self.kappa_done >= layout.bins() {
            return Err(Error::invalid(format!(
                "kappa_done must be below K = {}, got {}",
                layout.bins(),
                self.kappa_done
            )));
        }
        if 2 * self.l > layout.bin_size() {
            return Err(Error::invalid(format!(
                "l must be at most M/2 = {}, got {}",
                layout.bin_size() / 2,
                self.l
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryReport {
    /// Exact expected generations.
    pub exact: f64,
    /// Approximate expected generations; `None` outside μ ≥ 2, M ≥ 4.
    pub approx: Option<f64>,
    pub asymptotic_scale: f64,
    /// The asymptotic scale drops the population terms only when μ = λ.
    pub mu_equals_lambda: bool,
}

pub fn theory_report(params: &ModelParams) -> Result<TheoryReport> {
    let approx = if params.mu >= 2 && params.layout.bin_size() >= 4 {
        Some(approx_expected_time(params)?)
    } else {
        None
    };
    Ok(TheoryReport {
        exact: exact_expected_time(params)?,
        approx,
        asymptotic_scale: asymptotic_scale(&params.layout),
        mu_equals_lambda: params.mu == params.lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_validation() {
        let l = RoyalRoadLayout::new(4, 8).unwrap();
        assert!(ModelParams::new(l, 4, 4).is_ok());
        assert!(ModelParams::new(l, 0, 4).is_err());
        assert!(ModelParams::new(l, 4, 3).is_err());
    }

    #[test]
    fn report_first_row() {
        let p = ModelParams::new(RoyalRoadLayout::new(4, 8).unwrap(), 4, 4).unwrap();
        let r = theory_report(&p).unwrap();
        assert!((r.exact / 145.0 - 1.0).abs() < 0.02);
        assert_eq!(r.exact, exact_expected_time(&p).unwrap());
        assert!(r.approx.unwrap() > 0.0 && r.asymptotic_scale > 0.0);
        assert!(r.mu_equals_lambda);
    }

    #[test]
    fn report_without_approximation() {
        let p = ModelParams::new(RoyalRoadLayout::new(4, 8).unwrap(), 1, 2).unwrap();
        let r = theory_report(&p).unwrap();
        assert!(r.approx.is_none());
        assert!(r.exact > 0.0);
        assert!(!r.mu_equals_lambda);
    }
}
