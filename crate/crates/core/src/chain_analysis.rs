//! Sampling from rows of `P`, empirical-versus-exact statistics, and the
//! polynomial sequence generated by the four-term recursion `P q = x q`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::Rng;

use crate::coefficients::{reconstruct_row, LuCoefficients, TransitionRow};
use crate::urn_sim::StepDistribution;
use crate::{Error, Scalar};

/// Smallest sample accepted by [`chi_square_statistic`].
pub const MIN_CHI_SQUARE_SAMPLES: u64 = 100;

/// A probability law on states, in `f64`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProbabilityLaw {
    probs: BTreeMap<usize, f64>,
}

impl ProbabilityLaw {
    pub fn from_pairs<I: IntoIterator<Item = (usize, f64)>>(pairs: I) -> Self {
        let mut probs = BTreeMap::new();
        for (s, p) in pairs {
            *probs.entry(s).or_insert(0.0) += p;
        }
        Self { probs }
    }

    pub fn point_mass(state: usize) -> Self {
        Self::from_pairs([(state, 1.0)])
    }

    pub fn probability(&self, state: usize) -> f64 {
        self.probs.get(&state).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().map(|(&s, &p)| (s, p))
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

impl<S: Scalar> From<&TransitionRow<S>> for ProbabilityLaw {
    fn from(row: &TransitionRow<S>) -> Self {
        Self::from_pairs(row.outcomes().map(|(s, p)| (s, p.to_f64())))
    }
}

impl From<&StepDistribution> for ProbabilityLaw {
    fn from(d: &StepDistribution) -> Self {
        Self::from_pairs(d.to_f64())
    }
}

/// Counts of observed end states.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmpiricalDistribution {
    counts: BTreeMap<usize, u64>,
    total: u64,
}

impl EmpiricalDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, state: usize) {
        self.add(state, 1);
    }

    pub fn add(&mut self, state: usize, count: u64) {
        *self.counts.entry(state).or_insert(0) += count;
        self.total += count;
    }

    pub fn merge(&mut self, other: &Self) {
        for (&s, &c) in &other.counts {
            self.add(s, c);
        }
    }

    pub fn count(&self, state: usize) -> u64 {
        self.counts.get(&state).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.counts.iter().map(|(&s, &c)| (s, c))
    }

    pub fn frequency(&self, state: usize) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(state) as f64 / self.total as f64
        }
    }

    pub fn to_law(&self) -> ProbabilityLaw {
        ProbabilityLaw::from_pairs(self.counts().map(|(s, _)| (s, self.frequency(s))))
    }
}

impl FromIterator<usize> for EmpiricalDistribution {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut e = Self::new();
        for s in iter {
            e.record(s);
        }
        e
    }
}

/// Draws the next state from the categorical law of `row`.
pub fn sample_from_row<S: Scalar, R: Rng + ?Sized>(row: &TransitionRow<S>, rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = row.state + 1;
    for (state, p) in row.outcomes() {
        let p = p.to_f64();
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = state;
        if u < acc {
            return state;
        }
    }
    last
}

/// Total variation distance `½ Σ |p_i - q_i|` over the union of supports.
pub fn tv_distance(p: &ProbabilityLaw, q: &ProbabilityLaw) -> f64 {
    let mut states: Vec<usize> = p.iter().map(|(s, _)| s).chain(q.iter().map(|(s, _)| s)).collect();
    states.sort_unstable();
    states.dedup();
    0.5 * states
        .into_iter()
        .map(|s| {
            let d = p.probability(s) - q.probability(s);
            if d < 0.0 { -d } else { d }
        })
        .sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
}

/// Pearson statistic of observed counts against an exact law.
pub fn chi_square_statistic(observed: &EmpiricalDistribution, exact: &ProbabilityLaw) -> Result<ChiSquare, Error> {
    if observed.total() < MIN_CHI_SQUARE_SAMPLES {
        return Err(Error::TooFewSamples {
            total: observed.total(),
            min: MIN_CHI_SQUARE_SAMPLES,
        });
    }
    if let Some((state, _)) = observed.counts().find(|&(s, c)| c > 0 && exact.probability(s) <= 0.0) {
        return Err(Error::SupportMismatch { state });
    }
    let n = observed.total() as f64;
    let mut statistic = 0.0;
    for (state, p) in exact.iter() {
        if p <= 0.0 {
            return Err(Error::ZeroExpectedCell { state });
        }
        let expected = n * p;
        let d = observed.count(state) as f64 - expected;
        statistic += d * d / expected;
    }
    Ok(ChiSquare {
        statistic,
        degrees_of_freedom: exact.len().saturating_sub(1),
    })
}

/// Values `q_0(x), ..., q_{n_max}(x)` of the polynomial sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialEvaluation<S> {
    pub x: S,
    pub values: Vec<S>,
}

impl<S: Scalar> PolynomialEvaluation<S> {
    /// `x q_n - (d_n q_{n-2} + c_n q_{n-1} + b_n q_n + a_n q_{n+1})`.
    pub fn residual(&self, c: &LuCoefficients<S>, n: usize) -> Result<S, Error> {
        if n + 1 >= self.values.len() {
            return Err(Error::IndexOutOfRange {
                index: n + 1,
                available: self.values.len(),
            });
        }
        let row = reconstruct_row(c, n)?;
        let q = &self.values;
        let mut rhs = row.stay.clone() * q[n].clone() + row.up.clone() * q[n + 1].clone();
        if let Some(v) = &row.down_one {
            rhs = rhs + v.clone() * q[n - 1].clone();
        }
        if let Some(v) = &row.down_two {
            rhs = rhs + v.clone() * q[n - 2].clone();
        }
        Ok(self.x.clone() * q[n].clone() - rhs)
    }
}

/// Runs `q_{n+1} = ((x - b_n) q_n - c_n q_{n-1} - d_n q_{n-2}) / a_n` from
/// `q_0 = 1`, `q_{-1} = q_{-2} = 0`.
pub fn evaluate_polynomials<S: Scalar>(
    c: &LuCoefficients<S>,
    x: S,
    n_max: usize,
) -> Result<PolynomialEvaluation<S>, Error> {
    c.require(n_max)?;
    let mut values = Vec::with_capacity(n_max + 1);
    values.push(S::one());
    for n in 0..n_max {
        let row = reconstruct_row(c, n)?;
        if row.up.is_zero() {
            return Err(Error::DegenerateRecursion { index: n });
        }
        let mut acc = (x.clone() - row.stay.clone()) * values[n].clone();
        if let Some(v) = row.down_one {
            acc = acc - v * values[n - 1].clone();
        }
        if let Some(v) = row.down_two {
            acc = acc - v * values[n - 2].clone();
        }
        values.push(acc / row.up);
    }
    Ok(PolynomialEvaluation { x, values })
}
