//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion does. Run with `--nocapture` to see the lines.

use std::process::Command;
use std::time::{Duration, Instant};

use jpurn_core::banded::verify_lu;
use jpurn_core::chain_analysis::{chi_square_statistic, evaluate_polynomials, tv_distance, EmpiricalDistribution, ProbabilityLaw};
use jpurn_core::coefficients::{
    lu_coefficients, lu_coefficients_rational, lu_coefficients_real, lu_entry, reconstruct_row, validate_parameters,
    Parameters,
};
use jpurn_core::rng::DEFAULT_SEED;
use jpurn_core::urn_sim::{composite_step, enumerate_step_distribution, experiment1_urns, DeathSetup, Experiment};
use jpurn_core::{IntegerParameters, Rational, RngStream, Violation};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

type Outcome = Result<String, String>;

const GRID_SIDES: [u64; 4] = [1, 2, 3, 5];
const GRID_GAMMAS: [u64; 3] = [0, 1, 2];
const N_MAX: usize = 200;
const TRUNCATION: usize = 200;
const REAL_TOL: f64 = 1e-12;
const MC_TRIALS: u64 = 100_000;
const TV_LIMIT: f64 = 0.01;
const CHI_LEVEL: f64 = 0.999;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn grid() -> Vec<IntegerParameters> {
    let mut out = Vec::new();
    for m in GRID_SIDES {
        for n in GRID_SIDES {
            for g in GRID_GAMMAS {
                out.push(IntegerParameters::new(m, n, g).unwrap());
            }
        }
    }
    out
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn exact_lu_identity() -> Outcome {
    let start = Instant::now();
    for ip in grid() {
        let c = lu_coefficients_rational(&ip, TRUNCATION - 1).map_err(|e| e.to_string())?;
        let v = verify_lu(&c, TRUNCATION).map_err(|e| e.to_string())?;
        ensure(v.rows_compared == TRUNCATION - 2, || format!("{ip:?}: compared {} rows", v.rows_compared))?;
        ensure(v.mismatches == 0 && v.max_deviation == 0.0, || format!("{ip:?}: {v:?}"))?;
        ensure(v.band_ok(), || format!("{ip:?}: band {:?}", v.product_band))?;
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(10), || format!("took {took:?}"))?;
    Ok(format!("48 parameter sets, T={TRUNCATION}, rows 0..=197 exact, {took:?}"))
}

fn stochasticity() -> Outcome {
    for ip in grid() {
        let c = lu_coefficients_rational(&ip, N_MAX).map_err(|e| e.to_string())?;
        let r = c.stochasticity();
        ensure(r.passed() && r.max_lower_deviation == 0.0 && r.max_upper_deviation == 0.0, || {
            format!("{ip:?}: {r:?}")
        })?;
    }
    let mut rng = RngStream::new(DEFAULT_SEED, 2);
    let mut worst = 0.0f64;
    let mut accepted = 0;
    while accepted < 20 {
        let alpha = rng.random_range(-0.999..5.0);
        let beta = alpha + rng.random_range(-0.999..0.999);
        let gamma = rng.random_range(-0.999..5.0);
        let p = Parameters::new(alpha, beta, gamma);
        if !validate_parameters(&p).is_empty() {
            continue;
        }
        accepted += 1;
        let c = lu_coefficients_real(&p, N_MAX).map_err(|e| e.to_string())?;
        let r = c.stochasticity();
        ensure(r.out_of_range == 0, || format!("{p:?}: {r:?}"))?;
        worst = worst.max(r.max_upper_deviation).max(r.max_lower_deviation);
    }
    ensure(worst <= REAL_TOL, || format!("real deviation {worst:e}"))?;
    Ok(format!("exact on grid for n<={N_MAX}; 20 random real sets, max deviation {worst:e}"))
}

fn specialization() -> Outcome {
    for ip in grid() {
        let general = lu_coefficients(&ip.to_parameters(), N_MAX).map_err(|e| e.to_string())?;
        let integer = lu_coefficients_rational(&ip, N_MAX).map_err(|e| e.to_string())?;
        ensure(general == integer, || format!("{ip:?} differs"))?;
    }
    Ok(format!("general formulas at (1/M, 1/N) equal integer formulas, n<={N_MAX}"))
}

fn urn_oracle() -> Outcome {
    for ip in grid() {
        let c = lu_coefficients_rational(&ip, N_MAX).map_err(|e| e.to_string())?;
        for m in 0..=N_MAX {
            let death = enumerate_step_distribution(&ip, m, Experiment::One);
            let birth = enumerate_step_distribution(&ip, m, Experiment::Two);
            ensure(birth.probability(m) == c.y[m] && birth.probability(m + 1) == c.x[m], || {
                format!("{ip:?} m={m}: Experiment 2")
            })?;
            if m == 0 {
                ensure(death.probability(0).is_one(), || format!("{ip:?}: state 0 not absorbing"))?;
                continue;
            }
            let t = if m >= 2 { death.probability(m - 2) } else { Rational::zero() };
            ensure(
                death.probability(m) == c.s[m] && death.probability(m - 1) == c.r[m] && t == c.t[m],
                || format!("{ip:?} m={m}: Experiment 1"),
            )?;
        }
        let r1 = Rational::new(BigInt::from(ip.m), BigInt::from(ip.m * ip.gamma + 3 * ip.m + 1));
        ensure(enumerate_step_distribution(&ip, 1, Experiment::One).probability(0) == r1, || {
            format!("{ip:?}: r_1")
        })?;
    }
    Ok(format!("draw trees match (t,r,s) and (y,x) for m<={N_MAX}, r_1 = M/(M*gamma+3M+1)"))
}

fn worked_example() -> Outcome {
    let ip = IntegerParameters::new(2, 3, 1).unwrap();
    let DeathSetup::Triple { a, b, r } = experiment1_urns(&ip, 2) else {
        return Err("state 2 should use three urns".into());
    };
    ensure((a.blue, a.red) == (2, 9), || format!("urn A {a:?}"))?;
    ensure((b.blue, b.red) == (7, 20), || format!("urn B {b:?}"))?;
    ensure((r.blue, r.red) == (3, 13), || format!("urn R {r:?}"))?;
    let law = enumerate_step_distribution(&ip, 2, Experiment::One);
    let got = (law.probability(0), law.probability(1), law.probability(2));
    ensure(got == (q(14, 297), q(1369, 4752), q(117, 176)), || format!("law {got:?}"))?;
    ensure(law.total().is_one(), || "law does not sum to 1".into())?;
    let c = lu_coefficients_rational(&ip, 2).unwrap();
    let d2 = reconstruct_row(&c, 2).unwrap().down_two;
    ensure(d2 == Some(q(2, 99)), || format!("d_2 = {d2:?}"))?;
    Ok("A=(2,9) B=(7,20) R=(3 blue,13 red); (14/297, 1369/4752, 117/176); d_2 = 2/99".into())
}

fn monte_carlo() -> Outcome {
    let start = Instant::now();
    let ip = IntegerParameters::new(2, 3, 1).unwrap();
    let c = lu_coefficients_rational(&ip, 6).unwrap();
    let mut worst_tv = 0.0f64;
    let mut worst_p = 1.0f64;
    for m in 0..=5usize {
        let exact = ProbabilityLaw::from(&reconstruct_row(&c, m).unwrap());
        let mut rng = RngStream::new(DEFAULT_SEED, m as u64);
        let e: EmpiricalDistribution = (0..MC_TRIALS).map(|_| composite_step(&ip, m, &mut rng).1.end).collect();
        let tv = tv_distance(&e.to_law(), &exact);
        let chi = chi_square_statistic(&e, &exact).map_err(|e| e.to_string())?;
        let dist = ChiSquared::new(chi.degrees_of_freedom as f64).map_err(|e| e.to_string())?;
        let limit = dist.inverse_cdf(CHI_LEVEL);
        ensure(tv < TV_LIMIT, || format!("m={m}: TV {tv}"))?;
        ensure(chi.statistic < limit, || format!("m={m}: chi2 {} >= {limit}", chi.statistic))?;
        worst_tv = worst_tv.max(tv);
        worst_p = worst_p.min(1.0 - dist.cdf(chi.statistic));
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(5), || format!("took {took:?}"))?;
    Ok(format!("m=0..5, max TV {worst_tv:.5}, min p-value {worst_p:.4}, {took:?}"))
}

fn polynomial_normalization() -> Outcome {
    for ip in grid() {
        let c = lu_coefficients_rational(&ip, 100).map_err(|e| e.to_string())?;
        let eval = evaluate_polynomials(&c, Rational::one(), 100).map_err(|e| e.to_string())?;
        ensure(eval.values.len() == 101 && eval.values.iter().all(One::is_one), || format!("{ip:?}"))?;
    }
    let ip = IntegerParameters::new(2, 3, 1).unwrap();
    let c = lu_coefficients_rational(&ip, 1).unwrap();
    let row0 = reconstruct_row(&c, 0).unwrap();
    let q1 = evaluate_polynomials(&c, Rational::zero(), 1).unwrap().values[1].clone();
    ensure(q1 == -(row0.stay.clone() / row0.up.clone()) && q1 == q(-3, 4), || format!("q_1(0) = {q1}"))?;
    Ok("q_n(1) = 1 for n<=100 on grid; q_1(0) = -b_0/a_0 = -3/4".into())
}

fn validator() -> Outcome {
    let cases = [
        (Parameters::new(-1.0, -0.5, 0.0), Violation::AlphaAboveMinusOne),
        (Parameters::new(0.0, -1.2, 0.0), Violation::BetaAboveMinusOne),
        (Parameters::new(0.0, 0.0, -1.0), Violation::GammaAboveMinusOne),
        (Parameters::new(0.5, 2.0, 0.0), Violation::AlphaBetaGap),
        (Parameters::new(2.0, 1.0, 0.0), Violation::AlphaBetaGap),
    ];
    for (p, want) in &cases {
        let v = validate_parameters(p);
        ensure(v.contains(want), || format!("{p:?} not rejected for {want}"))?;
        ensure(lu_coefficients_real(p, 4).is_err(), || format!("{p:?} computed"))?;
    }
    ensure(validate_parameters(&Parameters::new(0.5, 1.0 / 3.0, 0.0)).is_empty(), || "valid set rejected".into())?;
    ensure(validate_parameters(&Parameters::new(0.4, 0.4, 1.0)).is_empty(), || "alpha = beta rejected".into())?;
    let forced = Parameters::new(2.0, 0.5, 0.0);
    let negative = (0..10).map(|m| lu_entry(&forced, m).t).fold(f64::INFINITY, f64::min);
    ensure(negative < 0.0, || "forced gap 1.5 gave no negative t".into())?;
    Ok(format!("{} invalid sets rejected; forced alpha-beta=1.5 gives t = {negative:.4}", cases.len()))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_jpurn"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 3] = [
        &["simulate", "--experiment", "composite", "--M", "2", "--N", "3", "--gamma", "1", "--initial", "4", "--trials", "2000", "--steps", "5", "--seed", "42"],
        &["simulate", "--experiment", "1", "--M", "3", "--N", "2", "--gamma", "0", "--initial", "9", "--trials", "20000", "--steps", "1", "--counts", "--seed", "42"],
        &["compare", "--M", "2", "--N", "3", "--gamma", "1", "--trials", "20000", "--seed", "7", "--format", "json"],
    ];
    let mut bytes = 0;
    for args in runs {
        let one = run_cli(&[args, &["--threads", "1"]].concat())?;
        let eight = run_cli(&[args, &["--threads", "8"]].concat())?;
        let again = run_cli(&[args, &["--threads", "8"]].concat())?;
        ensure(one == eight && eight == again, || format!("{args:?} differs across thread counts"))?;
        bytes += one.len();
    }
    Ok(format!("3 commands byte-identical at 1 and 8 threads ({bytes} bytes)"))
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 exact LU identity", exact_lu_identity),
        ("2 stochasticity", stochasticity),
        ("3 specialization consistency", specialization),
        ("4 urn-mechanics oracle", urn_oracle),
        ("5 worked example", worked_example),
        ("6 Monte Carlo agreement", monte_carlo),
        ("7 polynomial normalization", polynomial_normalization),
        ("8 validator", validator),
        ("9 determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                println!("FAIL  {name}: {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

