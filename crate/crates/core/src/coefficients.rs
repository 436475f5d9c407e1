//! Transition coefficients of the two stochastic factors and of the chain.
//!
//! State indices are flat: an index `m` is split by parity into `m = 2k` or
//! `m = 2k + 1` and dispatched to the matching closed form. `P_U` carries
//! `y_m` on the diagonal and `x_m` above it; `P_L` carries `t_m`, `r_m`, `s_m`
//! at columns `m - 2`, `m - 1`, `m`.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::{Error, Rational, Scalar, Violation};

/// Real parameters `(alpha, beta, gamma)` of the general chain.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameters<S> {
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
}

impl<S: Scalar> Parameters<S> {
    pub fn new(alpha: S, beta: S, gamma: S) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let violations = validate_parameters(self);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameters(violations))
        }
    }
}

/// Lists every stochasticity condition `p` violates; empty means valid.
///
/// `alpha == beta` is accepted. Non-finite `f64` inputs fail every comparison
/// they take part in.
pub fn validate_parameters<S: Scalar>(p: &Parameters<S>) -> Vec<Violation> {
    let minus_one = -S::one();
    let mut out = Vec::new();
    if !(p.alpha > minus_one) {
        out.push(Violation::AlphaAboveMinusOne);
    }
    if !(p.beta > minus_one) {
        out.push(Violation::BetaAboveMinusOne);
    }
    if !(p.gamma > minus_one) {
        out.push(Violation::GammaAboveMinusOne);
    }
    let gap = p.alpha.clone() - p.beta.clone();
    if !(gap < S::one() && gap > minus_one) {
        out.push(Violation::AlphaBetaGap);
    }
    out
}

/// Integer parameters of the urn model: `alpha = 1/m`, `beta = 1/n`.
///
/// `gamma = 0` is admitted; every ball count stays a non-negative integer
/// there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IntegerParameters {
    pub m: u64,
    pub n: u64,
    pub gamma: u64,
}

impl IntegerParameters {
    pub fn new(m: u64, n: u64, gamma: u64) -> Result<Self, Error> {
        let ip = Self { m, n, gamma };
        let violations = ip.violations();
        if violations.is_empty() {
            Ok(ip)
        } else {
            Err(Error::InvalidParameters(violations))
        }
    }

    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.m == 0 {
            out.push(Violation::MPositive);
        }
        if self.n == 0 {
            out.push(Violation::NPositive);
        }
        if self.m.abs_diff(self.n) as u128 >= self.m as u128 * self.n as u128 {
            out.push(Violation::MNGap);
        }
        out
    }

    /// The general parameters `(1/m, 1/n, gamma)` in exact arithmetic.
    pub fn to_parameters(&self) -> Parameters<Rational> {
        Parameters {
            alpha: Rational::new(BigInt::one(), BigInt::from(self.m)),
            beta: Rational::new(BigInt::one(), BigInt::from(self.n)),
            gamma: Rational::from_integer(BigInt::from(self.gamma)),
        }
    }

    pub fn to_real(&self) -> Parameters<f64> {
        Parameters {
            alpha: 1.0 / self.m as f64,
            beta: 1.0 / self.n as f64,
            gamma: self.gamma as f64,
        }
    }
}

/// The five coefficients attached to one state index.
#[derive(Debug, Clone, PartialEq)]
pub struct LuEntry<S> {
    pub x: S,
    pub y: S,
    pub t: S,
    pub r: S,
    pub s: S,
}

/// Coefficient sequences of `P_U` (`x`, `y`) and `P_L` (`t`, `r`, `s`) for
/// indices `0..len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct LuCoefficients<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
    pub t: Vec<S>,
    pub r: Vec<S>,
    pub s: Vec<S>,
}

impl<S: Scalar> LuCoefficients<S> {
    fn with_capacity(n: usize) -> Self {
        Self {
            x: Vec::with_capacity(n),
            y: Vec::with_capacity(n),
            t: Vec::with_capacity(n),
            r: Vec::with_capacity(n),
            s: Vec::with_capacity(n),
        }
    }

    fn push(&mut self, e: LuEntry<S>) {
        self.x.push(e.x);
        self.y.push(e.y);
        self.t.push(e.t);
        self.r.push(e.r);
        self.s.push(e.s);
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn entry(&self, m: usize) -> Option<LuEntry<S>> {
        (m < self.len()).then(|| LuEntry {
            x: self.x[m].clone(),
            y: self.y[m].clone(),
            t: self.t[m].clone(),
            r: self.r[m].clone(),
            s: self.s[m].clone(),
        })
    }

    pub(crate) fn require(&self, len: usize) -> Result<(), Error> {
        if len > self.len() {
            Err(Error::IndexOutOfRange {
                index: len - 1,
                available: self.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Checks `x + y = 1`, `t + r + s = 1` and `0 <= c <= 1` for every stored
    /// coefficient.
    pub fn stochasticity(&self) -> StochasticityReport {
        let mut report = StochasticityReport::default();
        for m in 0..self.len() {
            let up = self.x[m].clone() + self.y[m].clone();
            let down = self.t[m].clone() + self.r[m].clone() + self.s[m].clone();
            for (sum, dev) in [
                (up, &mut report.max_upper_deviation),
                (down, &mut report.max_lower_deviation),
            ] {
                let d = sum.distance(&S::one());
                if d > *dev {
                    *dev = d;
                }
                if !sum.agrees_with(&S::one()) {
                    report.sum_failures += 1;
                }
            }
            for v in [&self.x[m], &self.y[m], &self.t[m], &self.r[m], &self.s[m]] {
                if !is_probability(v) {
                    report.out_of_range += 1;
                }
            }
        }
        report
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct StochasticityReport {
    pub max_upper_deviation: f64,
    pub max_lower_deviation: f64,
    pub sum_failures: usize,
    pub out_of_range: usize,
}

impl StochasticityReport {
    pub fn passed(&self) -> bool {
        self.sum_failures == 0 && self.out_of_range == 0
    }
}

/// `num / den`, or zero when the integer prefactor `k` vanishes. The
/// denominators at `k = 0` may be zero for admissible parameters while the
/// term itself is identically zero.
fn vanishing_ratio<S: Scalar>(k: usize, num: S, den: S) -> S {
    if k == 0 {
        S::zero()
    } else {
        num / den
    }
}

/// Closed-form coefficients at index `m` for general parameters.
///
/// No validation is done. Parameters outside the stochastic region yield
/// coefficients outside `[0, 1]`.
pub fn lu_entry<S: Scalar>(p: &Parameters<S>, m: usize) -> LuEntry<S> {
    let k = m / 2;
    let kk = S::from_usize(k);
    let c = |v: u64| S::from_u64(v);
    let (a, b, g) = (p.alpha.clone(), p.beta.clone(), p.gamma.clone());
    let three_k = c(3) * kk.clone();
    let two_k = c(2) * kk.clone();

    if m % 2 == 0 {
        let ag = three_k.clone() + a.clone() + g.clone();
        let bg = three_k.clone() + b.clone() + g.clone();
        let den_xy = ag.clone() + c(2);
        let x = (two_k.clone() + g.clone() + c(1)) / den_xy.clone();
        let y = (kk.clone() + a.clone() + c(1)) / den_xy;
        let t = vanishing_ratio(
            k,
            kk.clone() * (kk.clone() + a.clone() - b.clone()),
            ag.clone() * (ag.clone() + c(1)),
        );
        // At k = 0 numerator and denominator coincide and may both vanish.
        let s = if k == 0 {
            S::one()
        } else {
            (two_k.clone() + a.clone() + g.clone() + c(1))
                * (two_k.clone() + b.clone() + g.clone() + c(1))
                / ((ag.clone() + c(1)) * (bg.clone() + c(1)))
        };
        let r = vanishing_ratio(
            k,
            kk.clone() * (two_k.clone() + b + g.clone()),
            ag.clone() * (ag.clone() + c(1)),
        ) + vanishing_ratio(
            k,
            kk * (two_k + a + g + c(1)),
            (ag + c(1)) * (bg + c(1)),
        );
        LuEntry { x, y, t, r, s }
    } else {
        let ag = three_k.clone() + a.clone() + g.clone();
        let bg = three_k.clone() + b.clone() + g.clone();
        let den_xy = bg.clone() + c(3);
        let x = (two_k.clone() + g.clone() + c(2)) / den_xy.clone();
        let y = (kk.clone() + b.clone() + c(1)) / den_xy;
        let t = vanishing_ratio(
            k,
            kk.clone() * (kk.clone() + b.clone() - a.clone()),
            (bg.clone() + c(1)) * (bg.clone() + c(2)),
        );
        let s = (two_k.clone() + a.clone() + g.clone() + c(2))
            * (two_k.clone() + b.clone() + g.clone() + c(2))
            / ((ag.clone() + c(3)) * (bg.clone() + c(2)));
        let r = vanishing_ratio(
            k,
            kk.clone() * (two_k.clone() + a + g.clone() + c(1)),
            (bg.clone() + c(1)) * (bg.clone() + c(2)),
        ) + (kk + c(1)) * (two_k + b + g + c(2)) / ((ag + c(3)) * (bg + c(2)));
        LuEntry { x, y, t, r, s }
    }
}

/// Coefficients at indices `0..=n_max` for validated general parameters.
pub fn lu_coefficients<S: Scalar>(
    p: &Parameters<S>,
    n_max: usize,
) -> Result<LuCoefficients<S>, Error> {
    p.validate()?;
    let mut out = LuCoefficients::with_capacity(n_max + 1);
    for m in 0..=n_max {
        out.push(lu_entry(p, m));
    }
    Ok(out)
}

/// Double-precision coefficients for general real parameters.
pub fn lu_coefficients_real(
    p: &Parameters<f64>,
    n_max: usize,
) -> Result<LuCoefficients<f64>, Error> {
    lu_coefficients(p, n_max)
}

fn ratio(num: BigInt, den: BigInt) -> Rational {
    Rational::new(num, den)
}

/// Exact coefficient at index `m` from the integer-parameter ball-count
/// formulas.
pub fn lu_entry_rational(ip: &IntegerParameters, m: usize) -> LuEntry<Rational> {
    let bm = BigInt::from(ip.m);
    let bn = BigInt::from(ip.n);
    let g = BigInt::from(ip.gamma);
    let k = BigInt::from(m / 2);
    let one = BigInt::one();
    let mn = &bm * &bn;

    if m % 2 == 0 {
        // 3Mk + Mγ + 1 and 3Mk + Mγ + M + 1
        let a0 = BigInt::from(3u8) * &bm * &k + &bm * &g + &one;
        let a1 = &a0 + &bm;
        let b1 = BigInt::from(3u8) * &bn * &k + &bn * &g + &bn + &one;
        let den_xy = &a1 + &bm;
        let x = ratio(&bm * (BigInt::from(2u8) * &k + &g + &one), den_xy.clone());
        let y = ratio(&bm * (&k + &one) + &one, den_xy);
        let t = ratio(
            &bm * &k * (&mn * &k + &bn - &bm),
            &bn * &a0 * &a1,
        );
        let s = ratio(
            (BigInt::from(2u8) * &bm * &k + &bm * &g + &bm + &one)
                * (BigInt::from(2u8) * &bn * &k + &bn * &g + &bn + &one),
            &a1 * &b1,
        );
        let r = ratio(
            &bm * &bm * &k * (BigInt::from(2u8) * &bn * &k + &bn * &g + &one),
            &bn * &a0 * &a1,
        ) + ratio(
            &bn * &k * (BigInt::from(2u8) * &bm * &k + &bm * &g + &bm + &one),
            &a1 * &b1,
        );
        LuEntry { x, y, t, r, s }
    } else {
        // 3Nk + Nγ + N + 1 and 3Nk + Nγ + 2N + 1
        let b1 = BigInt::from(3u8) * &bn * &k + &bn * &g + &bn + &one;
        let b2 = &b1 + &bn;
        let a3 = BigInt::from(3u8) * &bm * &k + &bm * &g + BigInt::from(3u8) * &bm + &one;
        let den_xy = &b2 + &bn;
        let x = ratio(
            &bn * (BigInt::from(2u8) * &k + &g + BigInt::from(2u8)),
            den_xy.clone(),
        );
        let y = ratio(&bn * (&k + &one) + &one, den_xy);
        let t = ratio(
            &bn * &k * (&mn * &k + &bm - &bn),
            &bm * &b1 * &b2,
        );
        let s = ratio(
            (BigInt::from(2u8) * &bm * &k + &bm * &g + BigInt::from(2u8) * &bm + &one)
                * (BigInt::from(2u8) * &bn * &k + &bn * &g + BigInt::from(2u8) * &bn + &one),
            &a3 * &b2,
        );
        let r = ratio(
            &bn * &bn * &k * (BigInt::from(2u8) * &bm * &k + &bm * &g + &bm + &one),
            &bm * &b1 * &b2,
        ) + ratio(
            &bm * (&k + &one) * (BigInt::from(2u8) * &bn * &k + &bn * &g + BigInt::from(2u8) * &bn + &one),
            &a3 * &b2,
        );
        LuEntry { x, y, t, r, s }
    }
}

/// Exact coefficients at indices `0..=n_max` for the urn-model parameters.
pub fn lu_coefficients_rational(
    ip: &IntegerParameters,
    n_max: usize,
) -> Result<LuCoefficients<Rational>, Error> {
    let violations = ip.violations();
    if !violations.is_empty() {
        return Err(Error::InvalidParameters(violations));
    }
    let mut out = LuCoefficients::with_capacity(n_max + 1);
    for m in 0..=n_max {
        out.push(lu_entry_rational(ip, m));
    }
    Ok(out)
}

/// One row of `P`: the probabilities of moving from `state` down by two, down
/// by one, staying, and moving up by one.
///
/// `down_two` (`d_n`) exists only for `state >= 2`, `down_one` (`c_n`) only
/// for `state >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionRow<S> {
    pub state: usize,
    pub down_two: Option<S>,
    pub down_one: Option<S>,
    pub stay: S,
    pub up: S,
}

impl<S: Scalar> TransitionRow<S> {
    /// `(target state, probability)` for every defined entry, ascending.
    pub fn outcomes(&self) -> impl Iterator<Item = (usize, &S)> + '_ {
        let n = self.state;
        self.down_two
            .as_ref()
            .map(|v| (n - 2, v))
            .into_iter()
            .chain(self.down_one.as_ref().map(|v| (n - 1, v)))
            .chain([(n, &self.stay), (n + 1, &self.up)])
    }

    pub fn sum(&self) -> S {
        self.outcomes()
            .fold(S::zero(), |acc, (_, v)| acc + v.clone())
    }
}

/// Row `n` of `P = P_L · P_U` from the factor coefficients:
///
/// ```text
/// a_n = s_n x_n
/// b_n = r_n x_{n-1} + s_n y_n          (b_0 = s_0 y_0)
/// c_n = r_n y_{n-1} + t_n x_{n-2}      (c_1 = r_1 y_0)
/// d_n = t_n y_{n-2}
/// ```
pub fn reconstruct_row<S: Scalar>(c: &LuCoefficients<S>, n: usize) -> Result<TransitionRow<S>, Error> {
    c.require(n + 1)?;
    let up = c.s[n].clone() * c.x[n].clone();
    let mut stay = c.s[n].clone() * c.y[n].clone();
    let mut down_one = None;
    let mut down_two = None;
    if n >= 1 {
        stay = stay + c.r[n].clone() * c.x[n - 1].clone();
        let mut v = c.r[n].clone() * c.y[n - 1].clone();
        if n >= 2 {
            v = v + c.t[n].clone() * c.x[n - 2].clone();
            down_two = Some(c.t[n].clone() * c.y[n - 2].clone());
        }
        down_one = Some(v);
    }
    Ok(TransitionRow {
        state: n,
        down_two,
        down_one,
        stay,
        up,
    })
}

impl<S: Scalar> LuCoefficients<S> {
    /// Rows of `P` for states `0..len()`.
    pub fn rows(&self) -> impl Iterator<Item = TransitionRow<S>> + '_ {
        (0..self.len()).map(move |n| reconstruct_row(self, n).expect("index within range"))
    }
}

/// `true` when `v` is a valid probability.
pub(crate) fn is_probability<S: Scalar>(v: &S) -> bool {
    *v >= S::zero() && *v <= S::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn validator_accepts_and_rejects() {
        assert!(validate_parameters(&Parameters::new(0.5, 1.0 / 3.0, 0.0)).is_empty());
        assert_eq!(
            validate_parameters(&Parameters::new(0.5, 2.0, 0.0)),
            [Violation::AlphaBetaGap]
        );
        assert_eq!(
            validate_parameters(&Parameters::new(-1.0, 0.0, 0.0)),
            [Violation::AlphaAboveMinusOne, Violation::AlphaBetaGap]
        );
        assert!(validate_parameters(&Parameters::new(0.3, 0.3, 0.0)).is_empty());
        assert_eq!(
            validate_parameters(&Parameters::new(f64::NAN, 0.0, -2.0)),
            [
                Violation::AlphaAboveMinusOne,
                Violation::GammaAboveMinusOne,
                Violation::AlphaBetaGap
            ]
        );
    }

    #[test]
    fn integer_parameter_validation() {
        assert!(IntegerParameters::new(1, 1, 0).is_ok());
        assert_eq!(
            IntegerParameters::new(0, 3, 0),
            Err(Error::InvalidParameters(alloc::vec![
                Violation::MPositive,
                Violation::MNGap
            ]))
        );
    }

    #[test]
    fn real_first_entries() {
        let c = lu_coefficients_real(&Parameters::new(1.0, 1.0, 0.0), 1).unwrap();
        assert!((c.x[0] - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.y[0] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!((c.t[0], c.r[0], c.s[0]), (0.0, 0.0, 1.0));
        assert_eq!(c.t[1], 0.0);
    }

    #[test]
    fn vanishing_denominators_at_zero_index() {
        // alpha + gamma = 0 and beta + gamma + 1 = 0 make the k = 0 denominators vanish.
        let c = lu_coefficients_real(&Parameters::new(0.0, -0.5, -0.5), 3).unwrap();
        assert_eq!(c.s[0], 1.0);
        assert!(c.stochasticity().passed());
        assert_eq!(c.t[0], 0.0);
        assert_eq!(c.r[0], 0.0);
        assert_eq!(c.t[1], 0.0);
    }

    #[test]
    fn general_formula_exact_at_half_third_one() {
        let p = Parameters::new(q(1, 2), q(1, 3), q(1, 1));
        let c = lu_coefficients(&p, 2).unwrap();
        assert_eq!(c.t[2], q(14, 297));
        let real = lu_coefficients_real(&Parameters::new(0.5, 1.0 / 3.0, 1.0), 2).unwrap();
        assert!((real.t[2] - 14.0 / 297.0).abs() < 1e-15);
    }

    #[test]
    fn rational_worked_example() {
        let ip = IntegerParameters::new(2, 3, 1).unwrap();
        let c = lu_coefficients_rational(&ip, 2).unwrap();
        assert_eq!((c.x[0].clone(), c.y[0].clone()), (q(4, 7), q(3, 7)));
        assert_eq!(c.t[2], q(14, 297));
        assert_eq!(c.s[2], q(117, 176));
        assert_eq!(c.r[2], q(1369, 4752));
    }

    #[test]
    fn rational_smallest_grid_point() {
        let ip = IntegerParameters::new(1, 1, 0).unwrap();
        let c = lu_coefficients_rational(&ip, 1).unwrap();
        assert_eq!(c.r[1], q(1, 4));
        assert_eq!(c.s[1], q(3, 4));
        assert_eq!(c.t[1], q(0, 1));
        assert_eq!((c.x[0].clone(), c.y[0].clone()), (q(1, 3), q(2, 3)));
    }

    #[test]
    fn reconstructed_rows_of_worked_example() {
        let ip = IntegerParameters::new(2, 3, 1).unwrap();
        let c = lu_coefficients_rational(&ip, 5).unwrap();
        let r0 = reconstruct_row(&c, 0).unwrap();
        assert_eq!((r0.stay.clone(), r0.up.clone()), (q(3, 7), q(4, 7)));
        assert!(r0.down_one.is_none() && r0.down_two.is_none());
        let r2 = reconstruct_row(&c, 2).unwrap();
        assert_eq!(r2.down_two, Some(q(2, 99)));
        for row in c.rows() {
            assert_eq!(row.sum(), q(1, 1));
        }
        assert_eq!(
            reconstruct_row(&c, 6),
            Err(Error::IndexOutOfRange { index: 6, available: 6 })
        );
    }

    #[test]
    fn forced_invalid_gap_gives_negative_t() {
        let p = Parameters::new(1.5, 0.0, 0.0);
        assert!(p.validate().is_err());
        assert!(lu_entry(&p, 3).t < 0.0);
        assert!(!is_probability(&lu_entry(&p, 3).t));
    }
}
