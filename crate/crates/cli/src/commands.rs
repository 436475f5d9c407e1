use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use jpurn_core::banded::verify_lu;
use jpurn_core::chain_analysis::{
    chi_square_statistic, evaluate_polynomials, tv_distance, EmpiricalDistribution, ProbabilityLaw,
};
use jpurn_core::coefficients::{lu_coefficients, lu_coefficients_rational, lu_coefficients_real, reconstruct_row};
use jpurn_core::urn_sim::{
    enumerate_step_distribution, exact_step_law, run_experiment_path, run_trajectory, Experiment, StepKind,
};
use jpurn_core::{IntegerParameters, LuCoefficients, Rational, RngStream, Scalar};
use rayon::prelude::*;
use serde_json::json;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::args::{
    CoeffsArgs, CompareArgs, ExperimentArg, Format, GraphArgs, PolyArgs, SimulateArgs, VerifyArgs, Which,
};
use crate::output::{emit, parse_rational, Cell, Render, Table};
use crate::params::{resolve, ParamSet};
use crate::CliError;

/// Largest total variation distance accepted by `compare`.
pub const TV_THRESHOLD: f64 = 0.01;
/// Chi-square quantile level used by `compare`.
pub const CHI_SQUARE_LEVEL: f64 = 0.999;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn format_or(format: Option<Format>, default: Format) -> Format {
    format.unwrap_or(default)
}

pub fn coeffs(a: CoeffsArgs) -> Result<(), CliError> {
    let params = resolve(&a.params)?;
    let table = match &params {
        ParamSet::Real(p) => coeff_table(&lu_coefficients_real(p, a.n_max)?),
        ParamSet::Integer(ip) => coeff_table(&lu_coefficients_rational(ip, a.n_max)?),
    }
    .meta("parameters", params.to_json());
    let text = table.render(format_or(a.output.format, Format::Csv))?;
    emit(&text, a.output.output.as_deref())
}

fn coeff_table<S: Scalar + Render>(c: &LuCoefficients<S>) -> Table {
    let mut t = Table::new("coeffs", &["n", "x", "y", "t", "r", "s", "a", "b", "c", "d"]);
    for row in c.rows() {
        let n = row.state;
        t.push(vec![
            n.into(),
            Cell::from(Some(&c.x[n])),
            Cell::from(Some(&c.y[n])),
            Cell::from(Some(&c.t[n])),
            Cell::from(Some(&c.r[n])),
            Cell::from(Some(&c.s[n])),
            Cell::from(Some(&row.up)),
            Cell::from(Some(&row.stay)),
            Cell::from(row.down_one.as_ref()),
            Cell::from(row.down_two.as_ref()),
        ]);
    }
    t
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn lu_checks<S: Scalar>(c: &LuCoefficients<S>, size: usize) -> Result<Vec<Check>, CliError> {
    let stoch = c.stochasticity();
    let v = verify_lu(c, size)?;
    Ok(vec![
        Check {
            name: "coefficient_sums",
            passed: stoch.sum_failures == 0,
            detail: format!(
                "max |x+y-1| = {:e}, max |t+r+s-1| = {:e}",
                stoch.max_upper_deviation, stoch.max_lower_deviation
            ),
        },
        Check {
            name: "coefficient_range",
            passed: stoch.out_of_range == 0,
            detail: format!("{} coefficients outside [0,1]", stoch.out_of_range),
        },
        Check {
            name: "lu_identity",
            passed: v.mismatches == 0,
            detail: format!(
                "{} rows compared, {} mismatches, max deviation {:e}",
                v.rows_compared, v.mismatches, v.max_deviation
            ),
        },
        Check {
            name: "band_structure",
            passed: v.band_ok(),
            detail: format!(
                "P (lower, upper) = {:?}, P_L = {:?}, P_U = {:?}",
                v.product_band, v.lower_factor_band, v.upper_factor_band
            ),
        },
        Check {
            name: "row_sums",
            passed: v.row_sum_failures == 0,
            detail: format!(
                "{} interior rows off by more than tolerance, max deviation {:e}",
                v.row_sum_failures, v.max_row_sum_deviation
            ),
        },
    ])
}

fn urn_checks(ip: &IntegerParameters, c: &LuCoefficients<Rational>) -> Result<Vec<Check>, CliError> {
    let n_max = c.len() - 1;
    let general = lu_coefficients(&ip.to_parameters(), n_max)?;
    let mut urn_mismatches = 0usize;
    for m in 0..c.len() {
        let death = enumerate_step_distribution(ip, m, Experiment::One);
        let birth = enumerate_step_distribution(ip, m, Experiment::Two);
        let mut ok = birth.probability(m) == c.y[m] && birth.probability(m + 1) == c.x[m];
        if m == 0 {
            ok &= death.probability(0) == Rational::from_u64(1);
        } else {
            ok &= death.probability(m) == c.s[m] && death.probability(m - 1) == c.r[m];
            if m >= 2 {
                ok &= death.probability(m - 2) == c.t[m];
            }
        }
        if !ok {
            urn_mismatches += 1;
        }
    }
    Ok(vec![
        Check {
            name: "specialization",
            passed: general == *c,
            detail: format!("general formulas at alpha=1/{}, beta=1/{} vs integer formulas, n <= {n_max}", ip.m, ip.n),
        },
        Check {
            name: "urn_enumeration",
            passed: urn_mismatches == 0,
            detail: format!("{urn_mismatches} states where the draw tree differs from the coefficients"),
        },
    ])
}

pub fn verify(a: VerifyArgs) -> Result<(), CliError> {
    if a.size == 0 {
        return Err(usage("--T must be at least 1"));
    }
    let params = resolve(&a.params)?;
    let checks = match &params {
        ParamSet::Real(p) => lu_checks(&lu_coefficients_real(p, a.size - 1)?, a.size)?,
        ParamSet::Integer(ip) => {
            let c = lu_coefficients_rational(ip, a.size - 1)?;
            let mut checks = lu_checks(&c, a.size)?;
            checks.extend(urn_checks(ip, &c)?);
            checks
        }
    };
    let passed = checks.iter().all(|c| c.passed);
    let mut table = Table::new("verify", &["check", "passed", "detail"])
        .meta("parameters", params.to_json())
        .meta("T", json!(a.size))
        .meta("passed", json!(passed));
    for c in &checks {
        table.push(vec![c.name.into(), c.passed.into(), c.detail.clone().into()]);
    }
    emit(&table.render(format_or(a.output.format, Format::Json))?, a.output.output.as_deref())?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Err(CliError::Verification(failed.join(", ")))
    }
}

fn step_kind(e: ExperimentArg) -> StepKind {
    match e {
        ExperimentArg::One => StepKind::Experiment1,
        ExperimentArg::Two => StepKind::Experiment2,
        ExperimentArg::Composite => StepKind::Composite,
    }
}

fn kind_name(k: StepKind) -> &'static str {
    match k {
        StepKind::Experiment1 => "1",
        StepKind::Experiment2 => "2",
        StepKind::Composite => "composite",
    }
}

fn parse_kind(s: &str) -> Option<StepKind> {
    match s {
        "1" => Some(StepKind::Experiment1),
        "2" => Some(StepKind::Experiment2),
        "composite" => Some(StepKind::Composite),
        _ => None,
    }
}

/// `(step, sub_step, state)` records of one trial; the first is the initial
/// state at step 0.
fn trial_records(
    ip: &IntegerParameters,
    kind: StepKind,
    initial: usize,
    steps: usize,
    seed: u64,
    trial: u64,
) -> Vec<(usize, u8, usize)> {
    let mut rng = RngStream::new(seed, trial);
    let mut out = vec![(0, 0, initial)];
    match kind {
        StepKind::Composite => {
            let t = run_trajectory(ip, initial, steps, &mut rng);
            for (i, s) in t.steps.iter().enumerate() {
                out.push((i + 1, 1, s.after_experiment1));
                out.push((i + 1, 2, s.after_experiment2));
            }
        }
        StepKind::Experiment1 | StepKind::Experiment2 => {
            let e = if kind == StepKind::Experiment1 { Experiment::One } else { Experiment::Two };
            let path = run_experiment_path(ip, e, initial, steps, &mut rng);
            out.extend(path.into_iter().enumerate().skip(1).map(|(i, s)| (i, 1, s)));
        }
    }
    out
}

fn end_state(ip: &IntegerParameters, kind: StepKind, initial: usize, steps: usize, seed: u64, trial: u64) -> usize {
    trial_records(ip, kind, initial, steps, seed, trial)
        .last()
        .map(|r| r.2)
        .unwrap_or(initial)
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool, CliError> {
    if threads == 0 {
        return Err(usage("--threads must be at least 1"));
    }
    Ok(rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(anyhow::Error::from)?)
}

/// End-state counts over `trials` independent streams; independent of the
/// thread count since counts are summed.
fn simulate_counts(
    pool: &rayon::ThreadPool,
    ip: &IntegerParameters,
    kind: StepKind,
    initial: usize,
    steps: usize,
    trials: u64,
    seed: u64,
) -> EmpiricalDistribution {
    pool.install(|| {
        (0..trials)
            .into_par_iter()
            .fold(EmpiricalDistribution::new, |mut acc, trial| {
                acc.record(end_state(ip, kind, initial, steps, seed, trial));
                acc
            })
            .reduce(EmpiricalDistribution::new, |mut a, b| {
                a.merge(&b);
                a
            })
    })
}

pub fn simulate(a: SimulateArgs) -> Result<(), CliError> {
    let params = resolve(&a.params)?;
    let ip = params.integer()?;
    let kind = step_kind(a.experiment);
    let seed = a.sampling.seed;
    let pool = thread_pool(a.sampling.threads)?;
    let base = |t: Table| {
        t.meta("parameters", params.to_json())
            .meta("experiment", json!(kind_name(kind)))
            .meta("seed", json!(seed))
            .meta("trials", json!(a.trials))
            .meta("steps", json!(a.steps))
    };
    let table = if a.counts {
        let counts = simulate_counts(&pool, &ip, kind, a.initial, a.steps, a.trials, seed);
        let mut t = base(Table::new("simulate", &["experiment", "steps", "start", "end", "count"]));
        for (end, count) in counts.counts() {
            t.push(vec![kind_name(kind).into(), a.steps.into(), a.initial.into(), end.into(), count.into()]);
        }
        t
    } else {
        let records: Vec<Vec<(usize, u8, usize)>> = pool.install(|| {
            (0..a.trials)
                .into_par_iter()
                .map(|trial| trial_records(&ip, kind, a.initial, a.steps, seed, trial))
                .collect()
        });
        let mut t = base(Table::new("simulate", &["trial", "step", "sub_step", "state"]));
        for (trial, recs) in records.into_iter().enumerate() {
            for (step, sub, state) in recs {
                t.push(vec![trial.into(), step.into(), Cell::Int(sub as i64), state.into()]);
            }
        }
        t
    };
    emit(&table.render(format_or(a.output.format, Format::Csv))?, a.output.output.as_deref())
}

/// Counts CSV written by `simulate --counts`, grouped by start state.
fn read_counts(path: &Path) -> Result<(StepKind, BTreeMap<usize, EmpiricalDistribution>), CliError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| anyhow::anyhow!("reading {}: {e}", path.display()))?;
    let headers = reader.headers().map_err(anyhow::Error::from)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["experiment", "steps", "start", "end", "count"] {
        return Err(usage(format!("{} is not a `simulate --counts` CSV", path.display())));
    }
    let mut kind = None;
    let mut groups: BTreeMap<usize, EmpiricalDistribution> = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(anyhow::Error::from)?;
        let k = parse_kind(&rec[0]).ok_or_else(|| usage(format!("unknown experiment {:?}", &rec[0])))?;
        if *kind.get_or_insert(k) != k {
            return Err(usage("counts file mixes experiments"));
        }
        let field = |i: usize| -> Result<u64, CliError> {
            rec[i].parse().map_err(|_| usage(format!("bad number {:?} in {}", &rec[i], path.display())))
        };
        if field(1)? != 1 {
            return Err(usage("compare needs one-step counts (simulate --steps 1)"));
        }
        groups.entry(field(2)? as usize).or_default().add(field(3)? as usize, field(4)?);
    }
    let kind = kind.ok_or_else(|| usage(format!("{} holds no counts", path.display())))?;
    Ok((kind, groups))
}

pub fn compare(a: CompareArgs) -> Result<(), CliError> {
    let params = resolve(&a.params)?;
    let ip = params.integer()?;
    let seed = a.sampling.seed;
    let (kind, groups) = match &a.input {
        Some(path) => read_counts(path)?,
        None => {
            let kind = step_kind(a.experiment);
            let pool = thread_pool(a.sampling.threads)?;
            let groups = a
                .initial
                .iter()
                .map(|&m| (m, simulate_counts(&pool, &ip, kind, m, 1, a.trials, seed)))
                .collect();
            (kind, groups)
        }
    };

    let mut table = Table::new(
        "compare",
        &[
            "experiment",
            "start",
            "trials",
            "tv_distance",
            "chi_square",
            "dof",
            "p_value",
            "chi_square_limit",
            "tv_pass",
            "chi_square_pass",
        ],
    )
    .meta("parameters", params.to_json())
    .meta("tv_threshold", json!(TV_THRESHOLD))
    .meta("chi_square_level", json!(CHI_SQUARE_LEVEL));
    if a.input.is_none() {
        table = table.meta("seed", json!(seed));
    }

    let mut all_pass = true;
    for (&m, observed) in &groups {
        let exact = ProbabilityLaw::from(&exact_step_law(&ip, m, kind));
        let tv = tv_distance(&observed.to_law(), &exact);
        let chi = chi_square_statistic(observed, &exact)?;
        let (p_value, limit) = if chi.degrees_of_freedom == 0 {
            (1.0, None)
        } else {
            let dist = ChiSquared::new(chi.degrees_of_freedom as f64).map_err(anyhow::Error::from)?;
            (1.0 - dist.cdf(chi.statistic), Some(dist.inverse_cdf(CHI_SQUARE_LEVEL)))
        };
        let tv_pass = tv < TV_THRESHOLD;
        let chi_pass = limit.is_none_or(|l| chi.statistic < l);
        all_pass &= tv_pass && chi_pass;
        table.push(vec![
            kind_name(kind).into(),
            m.into(),
            observed.total().into(),
            tv.render().into(),
            chi.statistic.render().into(),
            chi.degrees_of_freedom.into(),
            p_value.render().into(),
            Cell::from(limit.as_ref()),
            tv_pass.into(),
            chi_pass.into(),
        ]);
    }
    emit(&table.render(format_or(a.output.format, Format::Csv))?, a.output.output.as_deref())?;
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Verification("empirical law differs from the exact row".into()))
    }
}

pub fn poly(a: PolyArgs) -> Result<(), CliError> {
    let params = resolve(&a.params)?;
    let mut table = Table::new("poly", &["x", "n", "value"]).meta("parameters", params.to_json());
    match &params {
        ParamSet::Integer(ip) => {
            let c = lu_coefficients_rational(ip, a.n_max)?;
            for raw in &a.x {
                let x = parse_rational(raw).ok_or_else(|| usage(format!("--x {raw:?} is not a rational number")))?;
                push_poly(&mut table, &c, x, a.n_max)?;
            }
        }
        ParamSet::Real(p) => {
            let c = lu_coefficients_real(p, a.n_max)?;
            for raw in &a.x {
                let x: f64 = raw.parse().map_err(|_| usage(format!("--x {raw:?} is not a number")))?;
                push_poly(&mut table, &c, x, a.n_max)?;
            }
        }
    }
    emit(&table.render(format_or(a.output.format, Format::Csv))?, a.output.output.as_deref())
}

fn push_poly<S: Scalar + Render>(table: &mut Table, c: &LuCoefficients<S>, x: S, n_max: usize) -> Result<(), CliError> {
    let eval = evaluate_polynomials(c, x, n_max)?;
    let xs = eval.x.render();
    for (n, v) in eval.values.iter().enumerate() {
        table.push(vec![xs.clone().into(), n.into(), v.render().into()]);
    }
    Ok(())
}

pub fn graph(a: GraphArgs) -> Result<(), CliError> {
    if let Some(f) = a.output.format.filter(|f| *f != Format::Dot) {
        return Err(usage(format!("graph only writes DOT, not {f:?}")));
    }
    if a.size == 0 {
        return Err(usage("--T must be at least 1"));
    }
    let params = resolve(&a.params)?;
    let text = match &params {
        ParamSet::Real(p) => dot(&lu_coefficients_real(p, a.size - 1)?, a.which, a.size)?,
        ParamSet::Integer(ip) => dot(&lu_coefficients_rational(ip, a.size - 1)?, a.which, a.size)?,
    };
    emit(&text, a.output.output.as_deref())
}

/// `(source, target, probability, coefficient name)` edges of the chosen
/// matrix with both endpoints below `size`.
fn edges<S: Scalar>(c: &LuCoefficients<S>, which: Which, size: usize) -> Result<Vec<(usize, usize, S, String)>, CliError> {
    let mut out = Vec::new();
    for n in 0..size {
        match which {
            Which::Pu => {
                out.push((n, n, c.y[n].clone(), format!("y_{n}")));
                out.push((n, n + 1, c.x[n].clone(), format!("x_{n}")));
            }
            Which::Pl => {
                if n >= 2 {
                    out.push((n, n - 2, c.t[n].clone(), format!("t_{n}")));
                }
                if n >= 1 {
                    out.push((n, n - 1, c.r[n].clone(), format!("r_{n}")));
                }
                out.push((n, n, c.s[n].clone(), format!("s_{n}")));
            }
            Which::P => {
                let row = reconstruct_row(c, n)?;
                if let Some(v) = row.down_two {
                    out.push((n, n - 2, v, format!("d_{n}")));
                }
                if let Some(v) = row.down_one {
                    out.push((n, n - 1, v, format!("c_{n}")));
                }
                out.push((n, n, row.stay, format!("b_{n}")));
                out.push((n, n + 1, row.up, format!("a_{n}")));
            }
        }
    }
    out.retain(|e| e.1 < size);
    Ok(out)
}

fn dot<S: Scalar + Render>(c: &LuCoefficients<S>, which: Which, size: usize) -> Result<String, CliError> {
    let name = match which {
        Which::P => "P",
        Which::Pl => "P_L",
        Which::Pu => "P_U",
    };
    let mut s = String::new();
    writeln!(s, "digraph {name} {{").unwrap();
    writeln!(s, "  rankdir=LR;").unwrap();
    writeln!(s, "  node [shape=circle];").unwrap();
    for n in 0..size {
        writeln!(s, "  {n};").unwrap();
    }
    for (from, to, p, coef) in edges(c, which, size)? {
        writeln!(s, "  {from} -> {to} [label=\"{}\", tooltip=\"{coef}\"];", p.render()).unwrap();
    }
    s.push_str("}\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_birth_graph_edges() {
        let ip = IntegerParameters::new(2, 3, 1).unwrap();
        let c = lu_coefficients_rational(&ip, 2).unwrap();
        let e = edges(&c, Which::Pu, 3).unwrap();
        let pairs: Vec<_> = e.iter().map(|e| (e.0, e.1)).collect();
        assert_eq!(pairs, [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)]);
    }

    #[test]
    fn full_chain_graph_edge_set() {
        let ip = IntegerParameters::new(1, 1, 0).unwrap();
        let c = lu_coefficients_rational(&ip, 5).unwrap();
        let e = edges(&c, Which::P, 6).unwrap();
        // 4 per interior state, minus missing d/c bands at 0 and 1, minus a_5
        assert_eq!(e.len(), 6 * 4 - 3 - 1);
        assert!(e.iter().all(|(f, t, _, _)| *t + 2 >= *f && *t <= *f + 1));
        let l = edges(&c, Which::Pl, 6).unwrap();
        assert!(l.iter().all(|(f, t, _, _)| t <= f));
        assert_eq!(l[0].2, Rational::from_u64(1));
    }

    #[test]
    fn records_layout() {
        let ip = IntegerParameters::new(2, 3, 1).unwrap();
        let r = trial_records(&ip, StepKind::Composite, 4, 3, 1, 0);
        assert_eq!(r.len(), 1 + 2 * 3);
        assert_eq!(r[0], (0, 0, 4));
        assert_eq!((r[1].0, r[1].1, r[2].0, r[2].1), (1, 1, 1, 2));
        let r = trial_records(&ip, StepKind::Experiment2, 4, 3, 1, 0);
        assert_eq!(r.len(), 4);
        assert!(r.windows(2).all(|w| w[1].2 >= w[0].2));
    }
}
