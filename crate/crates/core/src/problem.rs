//! Royal Roads geometry, genomes and the two fitness functions.
//!
//! A string of `n = K * M` bits is split into `K` consecutive bins of `M`
//! bits. Bin `b` (0-based) occupies global positions `[b * M, (b + 1) * M)`.
//! A bin contributes `M` to the Royal Roads fitness only when every bit in it
//! is set. OneMax (the number of set bits) tracks progress that the plateaued
//! Royal Roads value cannot see.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RoyalRoadLayout {
    n: usize,
    bins: usize,
    bin_size: usize,
}

impl RoyalRoadLayout {
    /// Builds a layout of `bins` bins with `bin_size` bits each.
    ///
    /// `bin_size` must be even and at least 2 so that a half-full bin is
    /// well defined.
    pub fn new(bins: usize, bin_size: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::invalid("K (number of bins) must be at least 1"));
        }
        if bin_size < 2 {
            return Err(Error::invalid("M (bin size) must be at least 2"));
        }
        if !bin_size.is_multiple_of(2) {
            return Err(Error::invalid("M (bin size) must be even"));
        }
        let n = bins
            .checked_mul(bin_size)
            .ok_or_else(|| Error::invalid("n = K * M overflows"))?;
        Ok(Self { n, bins, bin_size })
    }

    /// Builds a layout from all three numbers, checking `n = K * M`.
    pub fn with_length(n: usize, bins: usize, bin_size: usize) -> Result<Self> {
        let layout = Self::new(bins, bin_size)?;
        if layout.n != n {
            return Err(Error::invalid(format!(
                "n must equal K * M (got n = {n}, K * M = {})",
                layout.n
            )));
        }
        Ok(layout)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of bins `K`.
    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Bin size `M`.
    pub fn bin_size(&self) -> usize {
        self.bin_size
    }

    pub fn bin_range(&self, bin: usize) -> std::ops::Range<usize> {
        bin * self.bin_size..(bin + 1) * self.bin_size
    }

    /// Fitness of the global optimum, equal to `n`.
    pub fn optimum(&self) -> FitnessValue {
        FitnessValue(self.n as u32)
    }
}

/// Royal Roads fitness, always a multiple of the bin size.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FitnessValue(pub u32);

impl FitnessValue {
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for FitnessValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Fixed-length bit string.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Genome {
    bits: Vec<bool>,
}

impl Genome {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            bits: vec![false; n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            bits: vec![true; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits[i] = value;
    }

    fn check(&self, layout: &RoyalRoadLayout) -> Result<()> {
        if self.bits.len() != layout.n() {
            return Err(Error::invalid(format!(
                "genome has {} bits, layout expects {}",
                self.bits.len(),
                layout.n()
            )));
        }
        Ok(())
    }
}

impl fmt::Debug for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Genome({self})")
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Genome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::invalid(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Genome::from_bits)
    }
}

/// Royal Roads fitness: `M` times the number of complete bins.
pub fn rr_fitness(genome: &Genome, layout: &RoyalRoadLayout) -> Result<FitnessValue> {
    genome.check(layout)?;
    Ok(rr_fitness_unchecked(genome, layout))
}

pub(crate) fn rr_fitness_unchecked(genome: &Genome, layout: &RoyalRoadLayout) -> FitnessValue {
    let complete = genome
        .bits
        .chunks_exact(layout.bin_size())
        .filter(|bin| bin.iter().all(|&b| b))
        .count();
    FitnessValue((complete * layout.bin_size()) as u32)
}

/// OneMax: the number of set bits.
pub fn onemax(genome: &Genome) -> usize {
    genome.bits.iter().filter(|&&b| b).count()
}

/// How the initial population is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum InitPolicy {
    /// Every bin holds exactly `M/2` ones at uniformly random positions.
    #[default]
    HalfOnes,
    /// Every bit is an independent fair coin.
    Random,
}

impl InitPolicy {
    pub fn sample<R: Rng + ?Sized>(self, layout: &RoyalRoadLayout, rng: &mut R) -> Genome {
        match self {
            InitPolicy::HalfOnes => half_ones_unchecked(layout, rng),
            InitPolicy::Random => random_init(layout, rng),
        }
    }
}

impl FromStr for InitPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "half_ones" | "half-ones" => Ok(InitPolicy::HalfOnes),
            "random" => Ok(InitPolicy::Random),
            other => Err(Error::invalid(format!("unknown init policy {other:?}"))),
        }
    }
}

/// Draws a genome whose every bin holds exactly `M/2` ones.
pub fn half_ones_init<R: Rng + ?Sized>(layout: &RoyalRoadLayout, rng: &mut R) -> Result<Genome> {
    if !layout.bin_size().is_multiple_of(2) {
        return Err(Error::invalid("M (bin size) must be even"));
    }
    Ok(half_ones_unchecked(layout, rng))
}

fn half_ones_unchecked<R: Rng + ?Sized>(layout: &RoyalRoadLayout, rng: &mut R) -> Genome {
    let half = layout.bin_size() / 2;
    let mut bits = Vec::with_capacity(layout.n());
    for _ in 0..layout.bins() {
        let start = bits.len();
        bits.extend((0..layout.bin_size()).map(|i| i < half));
        bits[start..].shuffle(rng);
    }
    Genome { bits }
}

/// Draws a genome of independent fair bits.
pub fn random_init<R: Rng + ?Sized>(layout: &RoyalRoadLayout, rng: &mut R) -> Genome {
    Genome {
        bits: (0..layout.n()).map(|_| rng.random::<bool>()).collect(),
    }
}
