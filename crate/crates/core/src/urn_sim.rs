//! Ball-level urn experiments realizing the two factors.
//!
//! Experiment 1 realizes `P_L` with urns A, B and R; Experiment 2 realizes
//! `P_U` with urn A alone. A step of the full chain is Experiment 1 followed
//! by Experiment 2 from wherever the first one ended. The state is the number
//! of blue balls left in urn A; refilling from the bath is implicit.
//!
//! Every draw is an integer sampled uniformly below the urn's ball count, and
//! the exact enumeration walks the same urns, so sampling and enumeration
//! cannot drift apart.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use arrayvec::ArrayVec;
use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;

use crate::{IntegerParameters, Rational, RngStream, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UrnId {
    A,
    B,
    R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Blue,
    Red,
}

impl Color {
    pub const BOTH: [Color; 2] = [Color::Blue, Color::Red];
}

/// Contents of one urn at draw time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Urn {
    pub id: UrnId,
    pub blue: u64,
    pub red: u64,
}

impl Urn {
    pub fn total(&self) -> u64 {
        self.blue + self.red
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Color {
        debug_assert!(self.total() > 0, "drawing from an empty urn");
        if rng.random_range(0..self.total()) < self.blue {
            Color::Blue
        } else {
            Color::Red
        }
    }

    pub fn probability(&self, color: Color) -> Rational {
        let favourable = match color {
            Color::Blue => self.blue,
            Color::Red => self.red,
        };
        Rational::new(BigInt::from(favourable), BigInt::from(self.total()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Draw {
    pub urn: UrnId,
    pub color: Color,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    /// Pure-death factor `P_L`.
    One,
    /// Pure-birth factor `P_U`.
    Two,
}

/// What one step of the simulation does.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Experiment1,
    Experiment2,
    /// Experiment 1 then Experiment 2: one step of `P`.
    Composite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub experiment: Experiment,
    pub start: usize,
    pub end: usize,
    pub draws: ArrayVec<Draw, 2>,
}

/// Urns prepared by Experiment 1 at a given state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeathSetup {
    /// State 0 is absorbing; nothing is drawn.
    Absorbed,
    /// State 1: a single draw from urn A.
    Single { a: Urn },
    /// States `2k` and `2k + 1` with `k >= 1`.
    Triple { a: Urn, b: Urn, r: Urn },
}

impl DeathSetup {
    fn second_urn(&self, first: Color) -> Option<Urn> {
        match (self, first) {
            (DeathSetup::Triple { b, .. }, Color::Blue) => Some(*b),
            (DeathSetup::Triple { r, .. }, Color::Red) => Some(*r),
            _ => None,
        }
    }

    fn first_urn(&self) -> Option<Urn> {
        match self {
            DeathSetup::Absorbed => None,
            DeathSetup::Single { a } | DeathSetup::Triple { a, .. } => Some(*a),
        }
    }
}

/// Urn compositions of Experiment 1 at state `m`.
pub fn experiment1_urns(ip: &IntegerParameters, m: usize) -> DeathSetup {
    let (bm, bn, g) = (ip.m, ip.n, ip.gamma);
    let k = (m / 2) as u64;
    match m {
        0 => DeathSetup::Absorbed,
        1 => DeathSetup::Single {
            a: Urn { id: UrnId::A, blue: bm, red: bm * g + 2 * bm + 1 },
        },
        _ if m % 2 == 0 => DeathSetup::Triple {
            a: Urn { id: UrnId::A, blue: bm * k, red: 2 * bm * k + bm * g + bm + 1 },
            b: Urn { id: UrnId::B, blue: bm * bn * k + bn - bm, red: bm * (2 * bn * k + bn * g + 1) },
            r: Urn { id: UrnId::R, blue: bn * k, red: 2 * bn * k + bn * g + bn + 1 },
        },
        _ => DeathSetup::Triple {
            a: Urn { id: UrnId::A, blue: bn * k, red: 2 * bn * k + bn * g + 2 * bn + 1 },
            b: Urn { id: UrnId::B, blue: bm * bn * k + bm - bn, red: bn * (2 * bm * k + bm * g + bm + 1) },
            r: Urn { id: UrnId::R, blue: bm * (k + 1), red: 2 * bm * k + bm * g + 2 * bm + 1 },
        },
    }
}

/// Urn A as filled by Experiment 2 at state `m`.
pub fn experiment2_urn(ip: &IntegerParameters, m: usize) -> Urn {
    let k = (m / 2) as u64;
    let (bm, bn, g) = (ip.m, ip.n, ip.gamma);
    if m % 2 == 0 {
        Urn { id: UrnId::A, blue: bm * (2 * k + g + 1), red: bm * (k + 1) + 1 }
    } else {
        Urn { id: UrnId::A, blue: bn * (2 * k + g + 2), red: bn * (k + 1) + 1 }
    }
}

fn death_end(m: usize, first: Color, second: Option<Color>) -> usize {
    match (first, second) {
        (Color::Blue, None) => m - 1,
        (Color::Red, None) => m,
        (Color::Blue, Some(Color::Blue)) => m - 2,
        (Color::Red, Some(Color::Red)) => m,
        _ => m - 1,
    }
}

fn birth_end(m: usize, color: Color) -> usize {
    match color {
        Color::Blue => m + 1,
        Color::Red => m,
    }
}

pub fn experiment1_step<R: Rng + ?Sized>(ip: &IntegerParameters, m: usize, rng: &mut R) -> StepOutcome {
    let setup = experiment1_urns(ip, m);
    let mut draws = ArrayVec::new();
    let end = match setup.first_urn() {
        None => m,
        Some(a) => {
            let first = a.draw(rng);
            draws.push(Draw { urn: a.id, color: first });
            let second = setup.second_urn(first).map(|u| {
                let c = u.draw(rng);
                draws.push(Draw { urn: u.id, color: c });
                c
            });
            death_end(m, first, second)
        }
    };
    StepOutcome { experiment: Experiment::One, start: m, end, draws }
}

pub fn experiment2_step<R: Rng + ?Sized>(ip: &IntegerParameters, m: usize, rng: &mut R) -> StepOutcome {
    let a = experiment2_urn(ip, m);
    let color = a.draw(rng);
    let mut draws = ArrayVec::new();
    draws.push(Draw { urn: a.id, color });
    StepOutcome { experiment: Experiment::Two, start: m, end: birth_end(m, color), draws }
}

/// One step of `P`: Experiment 1, then Experiment 2 from its end state.
pub fn composite_step<R: Rng + ?Sized>(
    ip: &IntegerParameters,
    m: usize,
    rng: &mut R,
) -> (StepOutcome, StepOutcome) {
    let death = experiment1_step(ip, m, rng);
    let birth = experiment2_step(ip, death.end, rng);
    (death, birth)
}

/// End state after one step of the given kind.
pub fn sample_step<R: Rng + ?Sized>(ip: &IntegerParameters, m: usize, kind: StepKind, rng: &mut R) -> usize {
    match kind {
        StepKind::Experiment1 => experiment1_step(ip, m, rng).end,
        StepKind::Experiment2 => experiment2_step(ip, m, rng).end,
        StepKind::Composite => composite_step(ip, m, rng).1.end,
    }
}

/// Exact law over end states.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepDistribution {
    probs: BTreeMap<usize, Rational>,
}

impl StepDistribution {
    fn add(&mut self, state: usize, p: Rational) {
        if p.is_zero() {
            return;
        }
        let slot = self.probs.entry(state).or_insert_with(Rational::zero);
        *slot = &*slot + p;
    }

    pub fn probability(&self, state: usize) -> Rational {
        self.probs.get(&state).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> + '_ {
        self.probs.iter().map(|(&s, p)| (s, p))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.keys().copied()
    }

    pub fn total(&self) -> Rational {
        self.probs.values().fold(Rational::zero(), |acc, p| acc + p)
    }

    pub fn to_f64(&self) -> Vec<(usize, f64)> {
        self.iter().map(|(s, p)| (s, p.to_f64())).collect()
    }
}

/// Walks every branch of the draw tree of one experiment at state `m`.
pub fn enumerate_step_distribution(ip: &IntegerParameters, m: usize, experiment: Experiment) -> StepDistribution {
    let mut out = StepDistribution::default();
    match experiment {
        Experiment::Two => {
            let a = experiment2_urn(ip, m);
            for c in Color::BOTH {
                out.add(birth_end(m, c), a.probability(c));
            }
        }
        Experiment::One => {
            let setup = experiment1_urns(ip, m);
            let Some(a) = setup.first_urn() else {
                out.add(m, Rational::from_u64(1));
                return out;
            };
            for first in Color::BOTH {
                let p1 = a.probability(first);
                match setup.second_urn(first) {
                    None => out.add(death_end(m, first, None), p1),
                    Some(u) => {
                        for second in Color::BOTH {
                            out.add(death_end(m, first, Some(second)), &p1 * u.probability(second));
                        }
                    }
                }
            }
        }
    }
    out
}

/// Exact one-step law of the composite step, by the chain rule over the two
/// enumerated experiments.
pub fn composite_distribution(ip: &IntegerParameters, m: usize) -> StepDistribution {
    let mut out = StepDistribution::default();
    for (mid, p1) in enumerate_step_distribution(ip, m, Experiment::One).iter() {
        for (end, p2) in enumerate_step_distribution(ip, mid, Experiment::Two).iter() {
            out.add(end, p1 * p2);
        }
    }
    out
}

pub fn exact_step_law(ip: &IntegerParameters, m: usize, kind: StepKind) -> StepDistribution {
    match kind {
        StepKind::Experiment1 => enumerate_step_distribution(ip, m, Experiment::One),
        StepKind::Experiment2 => enumerate_step_distribution(ip, m, Experiment::Two),
        StepKind::Composite => composite_distribution(ip, m),
    }
}

/// State after each half of a composite step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeState {
    pub after_experiment1: usize,
    pub after_experiment2: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub initial: usize,
    pub seed: u64,
    pub stream_id: u64,
    pub steps: Vec<CompositeState>,
}

impl Trajectory {
    /// Initial state followed by the state after every composite step.
    pub fn states(&self) -> impl Iterator<Item = usize> + '_ {
        core::iter::once(self.initial).chain(self.steps.iter().map(|s| s.after_experiment2))
    }
}

pub fn run_trajectory(ip: &IntegerParameters, initial: usize, steps: usize, rng: &mut RngStream) -> Trajectory {
    let mut m = initial;
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (death, birth) = composite_step(ip, m, rng);
        out.push(CompositeState {
            after_experiment1: death.end,
            after_experiment2: birth.end,
        });
        m = birth.end;
    }
    Trajectory {
        initial,
        seed: rng.seed(),
        stream_id: rng.stream_id(),
        steps: out,
    }
}

/// Path of repeated single experiments; the first entry is `initial`.
pub fn run_experiment_path<R: Rng + ?Sized>(
    ip: &IntegerParameters,
    experiment: Experiment,
    initial: usize,
    steps: usize,
    rng: &mut R,
) -> Vec<usize> {
    let mut path = Vec::with_capacity(steps + 1);
    let mut m = initial;
    path.push(m);
    for _ in 0..steps {
        m = match experiment {
            Experiment::One => experiment1_step(ip, m, rng).end,
            Experiment::Two => experiment2_step(ip, m, rng).end,
        };
        path.push(m);
    }
    path
}
