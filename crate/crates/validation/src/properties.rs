//! Randomized invariants, parameterized by the number of cases so the same
//! checks run both as ordinary tests and at acceptance scale.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::seq::SliceRandom;

use royal_road::engine::{replacement, rng_from_seed, swap_bits, Population, RunResult};
use royal_road::experiments::{summarize, ExperimentSpec, GridRow};
use royal_road::problem::{onemax, rr_fitness};
use royal_road::theory::approx::{level_time_at_gamma, rescaled_gamma};
use royal_road::theory::quadrature::integrate;
use royal_road::theory::{
    exact_expected_time, i2_quadrature, p_fail_level, p_sel, p_success_level, p_swap,
    reciprocal_progression_sum, theory_report, LevelState, ModelParams,
};

use royal_road::{Genome, RoyalRoadLayout};

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn finish(
    name: &str,
    r: Result<(), proptest::test_runner::TestError<impl std::fmt::Debug>>,
) -> Result<(), String> {
    r.map_err(|e| format!("{name}: {e}"))
}

fn params(k: usize, m: usize, mu: usize, lambda: usize) -> ModelParams {
    ModelParams::new(RoyalRoadLayout::new(k, m).unwrap(), mu, lambda).unwrap()
}

/// (K, M, μ, λ) with n = KM ≤ 1024.
fn model() -> impl Strategy<Value = (usize, usize, usize, usize)> {
    (1usize..=4, 1usize..=60, 1usize..=40).prop_flat_map(|(half_m, mu, half_lambda)| {
        let m = 2 * half_m;
        (1..=1024 / m, Just(m), Just(mu), Just(2 * half_lambda))
    })
}

pub fn probabilities_in_unit_interval(cases: u32) -> Result<(), String> {
    let strat = model()
        .prop_flat_map(|(k, m, mu, lambda)| (Just((k, m, mu, lambda)), 0..k, 0..=m / 2, 1..=mu));
    finish(
        "probabilities",
        runner(cases).run(&strat, |((k, m, mu, lambda), kappa, l, alpha)| {
            let p = params(k, m, mu, lambda);
            let s = LevelState::new(kappa, l);
            let sel = p_sel(alpha, mu).unwrap();
            let swap = p_swap(s, &p).unwrap();
            let fail = p_fail_level(s, &p).unwrap();
            let success = p_success_level(s, &p).unwrap();
            for v in [sel, swap, fail, success] {
                prop_assert!((0.0..=1.0).contains(&v), "{v}");
            }
            prop_assert!((fail + success - 1.0).abs() < 1e-12);
            Ok(())
        }),
    )
}

pub fn probability_monotonicity(cases: u32) -> Result<(), String> {
    let strat = model()
        .prop_flat_map(|(k, m, mu, lambda)| (Just((k, m, mu, lambda)), 0..k, 0..m / 2, 1..=mu));
    finish(
        "monotonicity",
        runner(cases).run(&strat, |((k, m, mu, lambda), kappa, l, alpha)| {
            let p = params(k, m, mu, lambda);
            if alpha < mu {
                prop_assert!(p_sel(alpha, mu).unwrap() <= p_sel(alpha + 1, mu).unwrap());
            }
            let here = p_swap(LevelState::new(kappa, l), &p).unwrap();
            prop_assert!(p_swap(LevelState::new(kappa, l + 1), &p).unwrap() <= here);
            if kappa + 1 < k {
                prop_assert!(p_swap(LevelState::new(kappa + 1, l), &p).unwrap() >= here);
            }
            let s = LevelState::new(kappa, l);
            let wider = params(k, m, mu, lambda + 2);
            prop_assert!(p_fail_level(s, &wider).unwrap() <= p_fail_level(s, &p).unwrap());
            Ok(())
        }),
    )
}

pub fn fitness_bounds(cases: u32) -> Result<(), String> {
    let strat = (1usize..=16, 1usize..=4).prop_flat_map(|(k, half_m)| {
        let m = 2 * half_m;
        (Just((k, m)), prop::collection::vec(any::<bool>(), k * m))
    });
    finish(
        "fitness",
        runner(cases).run(&strat, |((k, m), bits)| {
            let layout = RoyalRoadLayout::new(k, m).unwrap();
            let g = Genome::from_bits(bits);
            let f = rr_fitness(&g, &layout).unwrap().get() as usize;
            prop_assert!(f <= onemax(&g));
            prop_assert_eq!(f % m, 0);
            Ok(())
        }),
    )
}

pub fn swap_conservation(cases: u32) -> Result<(), String> {
    let strat = (2usize..=64).prop_flat_map(|n| {
        (
            prop::collection::vec(any::<bool>(), n),
            prop::collection::vec(any::<bool>(), n),
            0..n,
            0..n,
        )
    });
    finish(
        "swap",
        runner(cases).run(&strat, |(a, b, i, j)| {
            let (mut x, mut y) = (Genome::from_bits(a.clone()), Genome::from_bits(b.clone()));
            swap_bits(&mut x, &mut y, i, j);
            prop_assert_eq!(
                onemax(&x) + onemax(&y),
                a.iter().chain(&b).filter(|&&v| v).count()
            );
            prop_assert_eq!(x.get(i), b[j]);
            prop_assert_eq!(y.get(j), a[i]);
            for t in (0..a.len()).filter(|&t| t != i) {
                prop_assert_eq!(x.get(t), a[t]);
            }
            for t in (0..b.len()).filter(|&t| t != j) {
                prop_assert_eq!(y.get(t), b[t]);
            }
            Ok(())
        }),
    )
}

pub fn replacement_is_elitist(cases: u32) -> Result<(), String> {
    let strat = (1usize..=6, 1usize..=8, 1usize..=6).prop_flat_map(|(k, mu, half_lambda)| {
        let n = 4 * k;
        let genomes = |count| prop::collection::vec(prop::collection::vec(any::<bool>(), n), count);
        (Just(k), genomes(mu), genomes(2 * half_lambda))
    });
    finish(
        "elitism",
        runner(cases).run(&strat, |(k, members, pool)| {
            let layout = RoyalRoadLayout::new(k, 4).unwrap();
            let mu = members.len();
            let pop = Population::new(
                members.into_iter().map(Genome::from_bits).collect(),
                &layout,
            )
            .unwrap();
            let pool: Vec<Genome> = pool.into_iter().map(Genome::from_bits).collect();
            let next = replacement(&pop, &pool, &layout).unwrap();
            prop_assert_eq!(next.len(), mu);
            let pool_best = pool
                .iter()
                .map(|g| rr_fitness(g, &layout).unwrap())
                .max()
                .unwrap();
            prop_assert_eq!(next.best_fitness(), pop.best_fitness().max(pool_best));
            Ok(())
        }),
    )
}

pub fn exact_time_decreases_with_population(cases: u32) -> Result<(), String> {
    let strat = (1usize..=16, 1usize..=4, 1usize..=30);
    finish(
        "population",
        runner(cases).run(&strat, |(k, half_m, half)| {
            let m = 2 * half_m;
            let small = exact_expected_time(&params(k, m, 2 * half, 2 * half)).unwrap();
            let large = exact_expected_time(&params(k, m, 2 * half + 2, 2 * half + 2)).unwrap();
            prop_assert!(large < small, "{large} >= {small}");
            Ok(())
        }),
    )
}

pub fn digamma_telescope(cases: u32) -> Result<(), String> {
    let strat = (0.5f64..2000.0, 1.0f64..64.0, 1usize..=128);
    finish(
        "telescope",
        runner(cases).run(&strat, |(a, step, count)| {
            let direct: f64 = (0..count).map(|k| 1.0 / (a + k as f64 * step)).sum();
            let via = reciprocal_progression_sum(a, step, count).unwrap();
            prop_assert!((via / direct - 1.0).abs() < 1e-9, "{via} vs {direct}");
            Ok(())
        }),
    )
}

/// Composite Simpson rule with `panels` (even) subintervals.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

pub fn quadrature_self_convergence(cases: u32) -> Result<(), String> {
    let strat = (1usize..=16, 2usize..=4, 2usize..=40, 1usize..=30).prop_flat_map(
        |(k, half_m, mu, half_lambda)| (Just((k, 2 * half_m, mu, 2 * half_lambda)), 0..k),
    );
    finish(
        "quadrature",
        runner(cases).run(&strat, |((k, m, mu, lambda), kappa)| {
            let p = params(k, m, mu, lambda);
            let f = |t: f64| level_time_at_gamma(mu, rescaled_gamma(t, kappa, &p));
            let coarse = simpson(f, 0.0, 1.0, 512);
            let fine = simpson(f, 0.0, 1.0, 1024);
            prop_assert!((fine / coarse - 1.0).abs() < 1e-6);
            let adaptive = i2_quadrature(kappa, &p).unwrap();
            prop_assert!((adaptive / fine - 1.0).abs() < 1e-6, "{adaptive} vs {fine}");
            let direct = integrate(f, 0.0, 1.0, 1e-10).unwrap();
            prop_assert!((direct / adaptive - 1.0).abs() < 1e-7);
            Ok(())
        }),
    )
}

pub fn summary_ignores_order(cases: u32) -> Result<(), String> {
    let outcome = prop::option::weighted(0.8, 0usize..2000);
    let strat = (prop::collection::vec(outcome, 1..60), any::<u64>());
    finish(
        "permutation",
        runner(cases).run(&strat, |(hits, shuffle_seed)| {
            let row = GridRow::new(RoyalRoadLayout::new(4, 8).unwrap(), 4, 4).unwrap();
            let spec = ExperimentSpec::new(vec![row], hits.len(), 2000, 1);
            let theory = theory_report(&row.params().unwrap()).unwrap();
            let results: Vec<RunResult> = hits
                .iter()
                .map(|&h| RunResult {
                    hit_generation: h,
                    best_fitness_trace: Vec::new(),
                    final_best: Default::default(),
                })
                .collect();
            let mut shuffled = results.clone();
            shuffled.shuffle(&mut rng_from_seed(shuffle_seed));
            let a = summarize(&results, &theory, &row, &spec).unwrap();
            let b = summarize(&shuffled, &theory, &row, &spec).unwrap();
            prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
            Ok(())
        }),
    )
}

pub type Check = fn(u32) -> Result<(), String>;

/// Every property above, by name.
pub const ALL: [(&str, Check); 9] = [
    ("probabilities in [0, 1]", probabilities_in_unit_interval),
    ("probability monotonicity", probability_monotonicity),
    ("fitness bounds", fitness_bounds),
    ("swap conservation", swap_conservation),
    ("elitist replacement", replacement_is_elitist),
    (
        "exact time decreases in mu",
        exact_time_decreases_with_population,
    ),
    ("digamma telescope", digamma_telescope),
    ("quadrature self-convergence", quadrature_self_convergence),
    ("summary order invariance", summary_ignores_order),
];

#[cfg(test)]
mod tests {
    const CASES: u32 = 256;

    #[test]
    fn probabilities_in_unit_interval() {
        super::probabilities_in_unit_interval(CASES).unwrap();
    }

    #[test]
    fn probability_monotonicity() {
        super::probability_monotonicity(CASES).unwrap();
    }

    #[test]
    fn fitness_bounds() {
        super::fitness_bounds(CASES).unwrap();
    }

    #[test]
    fn swap_conservation() {
        super::swap_conservation(CASES).unwrap();
    }

    #[test]
    fn replacement_is_elitist() {
        super::replacement_is_elitist(CASES).unwrap();
    }

    #[test]
    fn exact_time_decreases_with_population() {
        super::exact_time_decreases_with_population(CASES).unwrap();
    }

    #[test]
    fn digamma_telescope() {
        super::digamma_telescope(CASES).unwrap();
    }

    #[test]
    fn quadrature_self_convergence() {
        super::quadrature_self_convergence(CASES).unwrap();
    }

    #[test]
    fn summary_ignores_order() {
        super::summary_ignores_order(CASES).unwrap();
    }
}
