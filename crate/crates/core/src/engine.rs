//! The elitist (μ+λ) EA with 1-Bit-Swap recombination.
//!
//! One generation:
//!
//! 1. build a mating pool of λ/2 parent pairs by binary tournament,
//! 2. apply 1-Bit-Swap to every pair, producing λ offspring,
//! 3. elitist replacement: the μ best of parents and offspring survive.
//!
//! A run starts from μ initial genomes and stops at the first generation in
//! which some member reaches fitness `n`, or when the budget is exhausted.

use std::cmp::Reverse;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problem::{
    rr_fitness, rr_fitness_unchecked, FitnessValue, Genome, InitPolicy, RoyalRoadLayout,
};

/// Generator used by every run; seeded from a 64-bit value.
pub type RunRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> RunRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// How equal-fitness candidates are ordered during replacement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum TieRule {
    /// Offspring outrank current members of equal fitness (pool order, then
    /// member order). Lets the population drift across fitness plateaus.
    #[default]
    OffspringFirst,
    /// Equal-fitness candidates are ordered uniformly at random.
    Uniform,
}

impl FromStr for TieRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "offspring_first" | "offspring-first" => Ok(TieRule::OffspringFirst),
            "uniform" => Ok(TieRule::Uniform),
            other => Err(Error::invalid(format!("unknown tie rule {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EAConfig {
    /// Population size μ.
    pub mu: usize,
    /// Pool size λ; the pool is built from λ/2 pairs.
    pub lambda: usize,
    pub max_generations: usize,
    pub init_policy: InitPolicy,
    pub tie_rule: TieRule,
    pub seed: u64,
}

impl EAConfig {
    pub fn new(mu: usize, lambda: usize, max_generations: usize, seed: u64) -> Self {
        Self {
            mu,
            lambda,
            max_generations,
            init_policy: InitPolicy::default(),
            tie_rule: TieRule::default(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_sizes(self.mu, self.lambda)?;
        if self.max_generations == 0 {
            return Err(Error::invalid("max_generations must be at least 1"));
        }
        Ok(())
    }
}

pub(crate) fn validate_sizes(mu: usize, lambda: usize) -> Result<()> {
    if mu == 0 {
        return Err(Error::invalid("mu must be at least 1"));
    }
    if lambda < 2 {
        return Err(Error::invalid("lambda must be at least 2"));
    }
    if !lambda.is_multiple_of(2) {
        return Err(Error::invalid("lambda must be even"));
    }
    Ok(())
}

/// μ genomes with their cached Royal Roads fitness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Population {
    members: Vec<Genome>,
    fitness: Vec<FitnessValue>,
}

impl Population {
    pub fn new(members: Vec<Genome>, layout: &RoyalRoadLayout) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::invalid("population must not be empty"));
        }
        let fitness = members
            .iter()
            .map(|g| rr_fitness(g, layout))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { members, fitness })
    }

    pub fn initial<R: Rng + ?Sized>(
        mu: usize,
        policy: InitPolicy,
        layout: &RoyalRoadLayout,
        rng: &mut R,
    ) -> Self {
        let members: Vec<_> = (0..mu).map(|_| policy.sample(layout, rng)).collect();
        let fitness = members
            .iter()
            .map(|g| rr_fitness_unchecked(g, layout))
            .collect();
        Self { members, fitness }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Genome] {
        &self.members
    }

    pub fn fitness(&self) -> &[FitnessValue] {
        &self.fitness
    }

    pub fn best_fitness(&self) -> FitnessValue {
        self.fitness.iter().copied().max().unwrap_or_default()
    }

    /// Number of members tied at the best fitness.
    pub fn elite_count(&self) -> usize {
        let best = self.best_fitness();
        self.fitness.iter().filter(|&&f| f == best).count()
    }
}

/// Binary tournament with a given pair of contestants. `coin` decides ties:
/// `true` picks `i`.
pub fn tournament_between(pop: &Population, i: usize, j: usize, coin: bool) -> usize {
    use std::cmp::Ordering::*;
    match pop.fitness[i].cmp(&pop.fitness[j]) {
        Greater => i,
        Less => j,
        Equal => {
            if coin {
                i
            } else {
                j
            }
        }
    }
}

/// Draws two members uniformly with replacement and returns the fitter one,
/// breaking ties with a fair coin.
pub fn tournament_pick<R: Rng + ?Sized>(pop: &Population, rng: &mut R) -> usize {
    let mu = pop.len();
    let i = rng.random_range(0..mu);
    let j = rng.random_range(0..mu);
    let coin = rng.random::<bool>();
    tournament_between(pop, i, j, coin)
}

/// Selects λ/2 parent pairs by independent tournaments. Parents are copies.
pub fn build_pool<R: Rng + ?Sized>(
    pop: &Population,
    lambda: usize,
    rng: &mut R,
) -> Result<Vec<(Genome, Genome)>> {
    if lambda == 0 || !lambda.is_multiple_of(2) {
        return Err(Error::invalid("lambda must be even"));
    }
    Ok((0..lambda / 2)
        .map(|_| {
            let a = tournament_pick(pop, rng);
            let b = tournament_pick(pop, rng);
            (pop.members[a].clone(), pop.members[b].clone())
        })
        .collect())
}

/// Exchanges bit `i` of `first` with bit `j` of `second`.
pub fn swap_bits(first: &mut Genome, second: &mut Genome, i: usize, j: usize) {
    let a = first.get(i);
    let b = second.get(j);
    first.set(i, b);
    second.set(j, a);
}

/// 1-Bit-Swap: one uniformly chosen position in each parent, values exchanged.
pub fn one_bit_swap<R: Rng + ?Sized>(pair: (Genome, Genome), rng: &mut R) -> (Genome, Genome) {
    let (mut first, mut second) = pair;
    let i = rng.random_range(0..first.len());
    let j = rng.random_range(0..second.len());
    swap_bits(&mut first, &mut second, i, j);
    (first, second)
}

/// Elitist replacement with offspring winning fitness ties.
///
/// See [`replacement_with`].
pub fn replacement(
    pop: &Population,
    pool: &[Genome],
    layout: &RoyalRoadLayout,
) -> Result<Population> {
    // OffspringFirst draws no randomness.
    replacement_with(
        pop,
        pool,
        layout,
        TieRule::OffspringFirst,
        &mut rng_from_seed(0),
    )
}

/// Elitist replacement.
///
/// Parents and offspring are ranked together by descending fitness and the
/// top μ survive, so every member strictly better than all offspring stays,
/// and the population best never decreases. Equal-fitness candidates are
/// ordered by `ties`.
pub fn replacement_with<R: Rng + ?Sized>(
    pop: &Population,
    pool: &[Genome],
    layout: &RoyalRoadLayout,
    ties: TieRule,
    rng: &mut R,
) -> Result<Population> {
    if pool.is_empty() {
        return Err(Error::invalid("offspring pool must not be empty"));
    }
    let pool_fitness = pool
        .iter()
        .map(|g| rr_fitness(g, layout))
        .collect::<Result<Vec<_>>>()?;

    // (fitness, tie key, source): source < pool.len() is an offspring index,
    // otherwise a member index offset by pool.len().
    let mut ranked: Vec<(FitnessValue, u64, usize)> = pool_fitness
        .iter()
        .copied()
        .chain(pop.fitness.iter().copied())
        .enumerate()
        .map(|(src, f)| {
            let key = match ties {
                TieRule::OffspringFirst => src as u64,
                TieRule::Uniform => rng.random::<u64>(),
            };
            (f, key, src)
        })
        .collect();
    ranked.sort_by_key(|&(f, key, src)| (Reverse(f), key, src));

    let mu = pop.len();
    let mut members = Vec::with_capacity(mu);
    let mut fitness = Vec::with_capacity(mu);
    for &(f, _, src) in ranked.iter().take(mu) {
        let genome = if src < pool.len() {
            pool[src].clone()
        } else {
            pop.members[src - pool.len()].clone()
        };
        members.push(genome);
        fitness.push(f);
    }
    Ok(Population { members, fitness })
}

/// One generation: pool, 1-Bit-Swap on every pair, replacement.
pub fn generation<R: Rng + ?Sized>(
    pop: &Population,
    config: &EAConfig,
    layout: &RoyalRoadLayout,
    rng: &mut R,
) -> Result<Population> {
    let pairs = build_pool(pop, config.lambda, rng)?;
    let mut offspring = Vec::with_capacity(config.lambda);
    for pair in pairs {
        let (a, b) = one_bit_swap(pair, rng);
        offspring.push(a);
        offspring.push(b);
    }
    replacement_with(pop, &offspring, layout, config.tie_rule, rng)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    /// First generation whose population contains the optimum; 0 is the
    /// initial population.
    pub hit_generation: Option<usize>,
    /// Best fitness of generation 0, 1, ... up to the hit or the budget.
    pub best_fitness_trace: Vec<FitnessValue>,
    pub final_best: FitnessValue,
}

/// Runs the EA from a population drawn with `config.init_policy`.
pub fn run(config: &EAConfig, layout: &RoyalRoadLayout) -> Result<RunResult> {
    config.validate()?;
    let mut rng = rng_from_seed(config.seed);
    let initial = Population::initial(config.mu, config.init_policy, layout, &mut rng);
    run_from(initial, config, layout, &mut rng)
}

/// Runs the EA from a given initial population. The trace stops at the
/// first hit.
pub fn run_from<R: Rng + ?Sized>(
    initial: Population,
    config: &EAConfig,
    layout: &RoyalRoadLayout,
    rng: &mut R,
) -> Result<RunResult> {
    config.validate()?;
    if initial.len() != config.mu {
        return Err(Error::invalid(format!(
            "initial population has {} members, mu is {}",
            initial.len(),
            config.mu
        )));
    }
    let optimum = layout.optimum();
    let mut pop = initial;
    let mut trace = Vec::with_capacity(config.max_generations + 1);
    trace.push(pop.best_fitness());
    let mut hit_generation = (pop.best_fitness() == optimum).then_some(0);

    let mut t = 0;
    while hit_generation.is_none() && t < config.max_generations {
        t += 1;
        pop = generation(&pop, config, layout, rng)?;
        let best = pop.best_fitness();
        trace.push(best);
        if best == optimum {
            hit_generation = Some(t);
        }
    }
    Ok(RunResult {
        hit_generation,
        final_best: pop.best_fitness(),
        best_fitness_trace: trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::onemax;

    fn layout(k: usize, m: usize) -> RoyalRoadLayout {
        RoyalRoadLayout::new(k, m).unwrap()
    }

    fn pop_of(bits: &[&str], layout: &RoyalRoadLayout) -> Population {
        Population::new(bits.iter().map(|s| s.parse().unwrap()).collect(), layout).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(EAConfig::new(4, 4, 10, 0).validate().is_ok());
        assert!(EAConfig::new(0, 4, 10, 0).validate().is_err());
        assert!(EAConfig::new(4, 3, 10, 0).validate().is_err());
        assert!(EAConfig::new(4, 0, 10, 0).validate().is_err());
        assert!(EAConfig::new(4, 4, 0, 0).validate().is_err());
    }

    #[test]
    fn tournament_fitter_wins() {
        let l = layout(2, 4);
        let pop = pop_of(&["11111111", "00000000"], &l);
        assert_eq!(tournament_between(&pop, 0, 1, false), 0);
        assert_eq!(tournament_between(&pop, 1, 0, true), 0);
    }

    #[test]
    fn tournament_single_member() {
        let l = layout(2, 4);
        let pop = pop_of(&["10101010"], &l);
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            assert_eq!(tournament_pick(&pop, &mut rng), 0);
        }
    }

    #[test]
    fn tournament_ties_are_fair() {
        let l = layout(2, 4);
        let pop = pop_of(&["11110000", "00001111"], &l);
        let mut rng = rng_from_seed(2);
        let trials = 10_000;
        let zeros = (0..trials)
            .filter(|_| tournament_pick(&pop, &mut rng) == 0)
            .count();
        let freq = zeros as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.03, "{freq}");
    }

    #[test]
    fn pool_shapes() {
        let l = layout(2, 4);
        let pop = pop_of(&["10101010"], &l);
        let mut rng = rng_from_seed(3);
        assert_eq!(build_pool(&pop, 2, &mut rng).unwrap().len(), 1);
        let pairs = build_pool(&pop, 4, &mut rng).unwrap();
        assert_eq!(pairs.len(), 2);
        for (a, b) in pairs {
            assert_eq!(a, pop.members()[0]);
            assert_eq!(b, pop.members()[0]);
        }
        assert!(build_pool(&pop, 3, &mut rng).is_err());
    }

    #[test]
    fn pool_selection_follows_rank() {
        // Distinct fitnesses 0 < 8 < 16 < 24 on n = 32, M = 8. The member of
        // rank r (1 = worst) wins a with-replacement binary tournament with
        // probability (2r - 1) / mu^2; computed here by enumerating all pairs.
        let l = layout(4, 8);
        let ones = |k: usize| {
            let mut bits = vec![false; 32];
            bits[..k * 8].fill(true);
            Genome::from_bits(bits)
        };
        let pop = Population::new((0..4).map(ones).collect(), &l).unwrap();
        let mu = 4;
        let mut exact = [0.0f64; 4];
        for i in 0..mu {
            for j in 0..mu {
                exact[i.max(j)] += 1.0 / (mu * mu) as f64;
            }
        }
        for (r, p) in exact.iter().enumerate() {
            assert!((p - (2 * r + 1) as f64 / 16.0).abs() < 1e-15);
        }

        let mut rng = rng_from_seed(4);
        let mut counts = [0usize; 4];
        let rounds = 20_000;
        for _ in 0..rounds {
            for (a, b) in build_pool(&pop, 4, &mut rng).unwrap() {
                counts[onemax(&a) / 8] += 1;
                counts[onemax(&b) / 8] += 1;
            }
        }
        let total = (rounds * 4) as f64;
        for r in 0..4 {
            let freq = counts[r] as f64 / total;
            let se = (exact[r] * (1.0 - exact[r]) / total).sqrt();
            assert!(
                (freq - exact[r]).abs() < 4.0 * se,
                "rank {r}: {freq} vs {}",
                exact[r]
            );
        }
        assert!(counts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn swap_examples() {
        let mut a: Genome = "00".parse().unwrap();
        let mut b: Genome = "11".parse().unwrap();
        swap_bits(&mut a, &mut b, 0, 1);
        assert_eq!(a.to_string(), "10");
        assert_eq!(b.to_string(), "10");

        let mut a: Genome = "0110".parse().unwrap();
        let mut b: Genome = "1001".parse().unwrap();
        swap_bits(&mut a, &mut b, 1, 0);
        assert_eq!(a.to_string(), "0110");
        assert_eq!(b.to_string(), "1001");
    }

    #[test]
    fn swap_conserves_ones() {
        let l = layout(4, 8);
        let mut rng = rng_from_seed(5);
        for _ in 0..1000 {
            let a = crate::problem::random_init(&l, &mut rng);
            let b = crate::problem::random_init(&l, &mut rng);
            let before = onemax(&a) + onemax(&b);
            let (x, y) = one_bit_swap((a, b), &mut rng);
            assert_eq!(onemax(&x) + onemax(&y), before);
        }
    }

    #[test]
    fn replacement_keeps_elite_and_admits_better() {
        let l = layout(2, 8);
        let pop = pop_of(&["1111111100000000", "0000000000000000"], &l);
        let pool: Vec<Genome> = ["1111111111111111", "0000000000000000"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let next = replacement(&pop, &pool, &l).unwrap();
        let mut f: Vec<_> = next.fitness().iter().map(|f| f.get()).collect();
        f.sort();
        assert_eq!(f, vec![8, 16]);
    }

    #[test]
    fn replacement_with_worse_pool_keeps_best() {
        let l = layout(2, 8);
        let pop = pop_of(&["1111111100000000", "0000000011111111"], &l);
        let pool: Vec<Genome> = vec![Genome::zeros(16); 2];
        let next = replacement(&pop, &pool, &l).unwrap();
        assert_eq!(next.best_fitness(), FitnessValue(8));
        assert_eq!(next.fitness(), &[FitnessValue(8), FitnessValue(8)]);
    }

    #[test]
    fn replacement_single_member() {
        let l = layout(1, 8);
        let pop = pop_of(&["00001111"], &l);
        let pool: Vec<Genome> = vec!["01111111".parse().unwrap(), Genome::ones(8)];
        let next = replacement(&pop, &pool, &l).unwrap();
        assert_eq!(next.fitness(), &[FitnessValue(8)]);
    }

    #[test]
    fn replacement_offspring_win_ties() {
        let l = layout(1, 4);
        let pop = pop_of(&["0011", "0101"], &l);
        let pool: Vec<Genome> = vec!["1001".parse().unwrap(), "0110".parse().unwrap()];
        let next = replacement(&pop, &pool, &l).unwrap();
        assert_eq!(next.members(), pool.as_slice());
        assert!(replacement(&pop, &[], &l).is_err());
    }

    #[test]
    fn replacement_larger_population_than_pool() {
        let l = layout(1, 4);
        let pop = pop_of(&["0011", "0101", "1111"], &l);
        let pool: Vec<Genome> = vec!["1001".parse().unwrap(), "0110".parse().unwrap()];
        let next = replacement(&pop, &pool, &l).unwrap();
        assert_eq!(next.len(), 3);
        assert_eq!(next.members()[0], Genome::ones(4));
    }

    #[test]
    fn generation_preserves_optimum_and_cache() {
        let l = layout(4, 8);
        let mut rng = rng_from_seed(6);
        let mut members: Vec<Genome> = (0..4)
            .map(|_| crate::problem::random_init(&l, &mut rng))
            .collect();
        members[2] = Genome::ones(32);
        let mut pop = Population::new(members, &l).unwrap();
        let config = EAConfig::new(4, 4, 10, 0);
        for _ in 0..50 {
            pop = generation(&pop, &config, &l, &mut rng).unwrap();
            assert_eq!(pop.best_fitness(), FitnessValue(32));
            assert_eq!(pop.len(), 4);
            for (g, f) in pop.members().iter().zip(pop.fitness()) {
                assert_eq!(rr_fitness(g, &l).unwrap(), *f);
            }
        }
    }

    #[test]
    fn micro_instance_matches_enumeration() {
        // n = 2, K = 1, M = 2, mu = 1, lambda = 2, member "10". Both parents
        // are copies of "10"; of the n^2 = 4 equiprobable (i, j) choices only
        // (1, 0) and (0, 1) move a one onto the other's zero giving "11".
        let l = layout(1, 2);
        let mut favourable = 0;
        for i in 0..2 {
            for j in 0..2 {
                let mut a: Genome = "10".parse().unwrap();
                let mut b: Genome = "10".parse().unwrap();
                swap_bits(&mut a, &mut b, i, j);
                if a == Genome::ones(2) || b == Genome::ones(2) {
                    favourable += 1;
                }
            }
        }
        let p = favourable as f64 / 4.0;
        assert_eq!(p, 0.5);

        let pop = pop_of(&["10"], &l);
        let config = EAConfig::new(1, 2, 1, 0);
        let mut rng = rng_from_seed(7);
        let trials = 100_000;
        let hits = (0..trials)
            .filter(|_| {
                generation(&pop, &config, &l, &mut rng).unwrap().members()[0] == Genome::ones(2)
            })
            .count();
        let freq = hits as f64 / trials as f64;
        let se = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((freq - p).abs() < 3.0 * se, "{freq}");
    }

    #[test]
    fn run_hits_immediately_from_optimal_start() {
        let l = layout(2, 4);
        let pop = pop_of(&["11111111", "00000000"], &l);
        let config = EAConfig::new(2, 2, 5, 0);
        let result = run_from(pop, &config, &l, &mut rng_from_seed(0)).unwrap();
        assert_eq!(result.hit_generation, Some(0));
        assert_eq!(result.best_fitness_trace, vec![FitnessValue(8)]);
    }

    #[test]
    fn run_half_ones_never_hits_at_zero() {
        let l = layout(4, 8);
        for seed in 0..20 {
            let result = run(&EAConfig::new(4, 4, 2000, seed), &l).unwrap();
            assert_ne!(result.hit_generation, Some(0));
            assert_eq!(result.best_fitness_trace[0], FitnessValue(0));
        }
    }

    #[test]
    fn run_is_deterministic() {
        let l = layout(4, 8);
        let config = EAConfig::new(10, 10, 300, 99);
        assert_eq!(run(&config, &l).unwrap(), run(&config, &l).unwrap());
    }

    #[test]
    fn run_trace_is_monotone() {
        let l = layout(4, 8);
        for seed in 0..10 {
            let mut config = EAConfig::new(4, 4, 500, seed);
            config.tie_rule = TieRule::Uniform;
            let result = run(&config, &l).unwrap();
            assert!(result.best_fitness_trace.windows(2).all(|w| w[0] <= w[1]));
            assert_eq!(
                result.final_best,
                *result.best_fitness_trace.last().unwrap()
            );
        }
    }

    #[test]
    fn run_rejects_population_size_mismatch() {
        let l = layout(2, 4);
        let pop = pop_of(&["11110000"], &l);
        let config = EAConfig::new(2, 2, 5, 0);
        assert!(run_from(pop, &config, &l, &mut rng_from_seed(0)).is_err());
    }
}
