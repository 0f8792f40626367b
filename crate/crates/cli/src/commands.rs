use std::f64::consts::PI;

use fstirap_core::dynamics::min_steps;
use fstirap_core::optimize::{
    alpha_opt, c_opt_closed_form, c_opt_limit, optimize_numerical, sweep_tf, t_f_opt_and_c_max,
};
use fstirap_core::{
    concurrence_fast, evolve_trajectory, reduce, wootters_concurrence, PulseProfile64,
    SystemParams64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{sci, sci_vec, Csv, Reasons, Sci};
use crate::CliError;

/// Overrides from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Flags {
    pub steps: Option<usize>,
    pub free_endpoint: bool,
}

fn json<S: Serialize>(v: &S) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct ParamsOut {
    g0: Sci,
    gamma: Sci,
    kappa1: Sci,
    kappa2: Sci,
}

impl From<&SystemParams64> for ParamsOut {
    fn from(p: &SystemParams64) -> Self {
        Self {
            g0: Sci(p.g0),
            gamma: Sci(p.gamma),
            kappa1: Sci(p.kappa1),
            kappa2: Sci(p.kappa2),
        }
    }
}

#[derive(Serialize)]
struct AnalyticReport {
    params: ParamsOut,
    tf: Sci,
    n: usize,
    alpha_opt: Option<Vec<Sci>>,
    c_opt: Option<Sci>,
    c_opt_limit: Option<Sci>,
    tf_opt: Option<Sci>,
    c_max: Option<Sci>,
    cooperativity: Option<Sci>,
    reasons: Reasons,
}

pub fn analytic(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params()?;
    let t_f = cfg.t_f()?;
    let n = cfg.order();
    let mut reasons = Reasons::default();
    let alpha = reasons
        .take("alpha_opt", alpha_opt(&p, t_f, n))
        .map(|a| sci_vec(&a));
    let c_opt = reasons.number("c_opt", c_opt_closed_form(&p, t_f, n));
    let limit = reasons.number("c_opt_limit", c_opt_limit(&p, t_f));
    let opt = t_f_opt_and_c_max(&p);
    let tf_opt = reasons.number("tf_opt", opt.clone().map(|o| o.0));
    let c_max = reasons.number("c_max", opt.map(|o| o.1));
    let coop = reasons.number("cooperativity", p.cooperativity());
    json(&AnalyticReport {
        params: (&p).into(),
        tf: Sci(t_f),
        n,
        alpha_opt: alpha,
        c_opt,
        c_opt_limit: limit,
        tf_opt,
        c_max,
        cooperativity: coop,
        reasons,
    })
}

pub const SIMULATE_HEADER: [&str; 11] = [
    "t",
    "theta",
    "G1",
    "G2",
    "rho11",
    "rho22",
    "rho33",
    "rho44",
    "re_rho13",
    "im_rho13",
    "concurrence",
];

pub fn simulate(cfg: &RunConfig, flags: Flags) -> Result<String, CliError> {
    let p = cfg.params()?;
    let opts = cfg.numeric_options(flags.steps, flags.free_endpoint);
    let prof = cfg.profile(&p, &opts)?;
    let n_steps = flags
        .steps
        .or(cfg.steps)
        .unwrap_or_else(|| min_steps(&p, prof.t_f()));
    let traj = evolve_trajectory(&p, &prof, n_steps, cfg.stride.unwrap_or(1))?;
    let mut csv = Csv::new(&SIMULATE_HEADER.map(String::from));
    for (k, rho) in traj.states.iter().enumerate() {
        let t = traj.times[k];
        let theta = traj.theta_at(k);
        let (g1, g2) = prof.couplings(&p, t)?;
        let r13 = rho.element(1, 3);
        csv.row(&[
            sci(t),
            sci(theta),
            sci(g1),
            sci(g2),
            sci(rho.population(1)),
            sci(rho.population(2)),
            sci(rho.population(3)),
            sci(rho.population(4)),
            sci(r13.re),
            sci(r13.im),
            sci(concurrence_fast(rho)),
        ]);
    }
    Ok(csv.finish())
}

fn cell(v: Option<f64>) -> String {
    v.map(sci).unwrap_or_default()
}

pub fn sweep(cfg: &RunConfig, flags: Flags) -> Result<String, CliError> {
    let p = cfg.params()?;
    let orders = cfg.orders();
    let grid = cfg.grid()?;
    let mode = cfg.mode.unwrap_or_default();
    let opts = cfg.numeric_options(flags.steps, flags.free_endpoint);
    let rows = sweep_tf(&p, &orders, &grid, mode.into(), &opts)?;

    let mut header = vec!["G0_tf".to_string()];
    let (num, ana) = (rows[0].numeric.is_some(), rows[0].analytic.is_some());
    if num {
        header.extend(orders.iter().map(|k| format!("c_numeric_N{k}")));
    }
    if ana {
        header.extend(orders.iter().map(|k| format!("c_analytic_N{k}")));
    }
    header.extend(["c_opt_limit", "c_max", "validity_flag"].map(String::from));
    let mut csv = Csv::new(&header);
    for row in &rows {
        let mut cells = vec![sci(row.t_f)];
        if let Some(v) = &row.numeric {
            cells.extend(v.iter().map(|&c| sci(c)));
        }
        if let Some(v) = &row.analytic {
            cells.extend(v.iter().map(|&c| cell(c)));
        }
        cells.push(sci(row.c_opt_limit));
        cells.push(cell(row.c_max));
        cells.push(if row.valid { "1" } else { "0" }.to_string());
        csv.row(&cells);
    }
    Ok(csv.finish())
}

pub const THETA_SAMPLES: usize = 200;

#[derive(Serialize)]
struct ThetaSamples {
    t: Vec<Sci>,
    theta: Vec<Sci>,
}

#[derive(Serialize)]
struct OptimizeReport {
    params: ParamsOut,
    tf: Sci,
    n: usize,
    free_endpoint: bool,
    budget: usize,
    steps: usize,
    alpha: Vec<Sci>,
    theta_tf: Sci,
    concurrence: Sci,
    warm_start_concurrence: Sci,
    analytic_c_opt: Option<Sci>,
    converged: bool,
    objective_evals: usize,
    history: Option<Vec<Sci>>,
    theta_samples: ThetaSamples,
    reasons: Reasons,
}

pub fn optimize(cfg: &RunConfig, flags: Flags) -> Result<String, CliError> {
    let p = cfg.params()?;
    let t_f = cfg.t_f()?;
    let n = cfg.order();
    let opts = cfg.numeric_options(flags.steps, flags.free_endpoint);
    let r = optimize_numerical(&p, t_f, n, &opts)?;
    let mut reasons = Reasons::default();
    let analytic_c_opt = reasons.number("analytic_c_opt", c_opt_closed_form(&p, t_f, n));

    let last = (THETA_SAMPLES - 1) as f64;
    let times: Vec<f64> = (0..THETA_SAMPLES)
        .map(|k| {
            if k == THETA_SAMPLES - 1 {
                t_f
            } else {
                t_f * k as f64 / last
            }
        })
        .collect();
    let theta = times
        .iter()
        .map(|&t| r.profile.theta(t))
        .collect::<Result<Vec<_>, _>>()?;
    json(&OptimizeReport {
        params: (&p).into(),
        tf: Sci(t_f),
        n,
        free_endpoint: r.free_endpoint,
        budget: opts.budget,
        steps: opts.n_steps.unwrap_or_else(|| min_steps(&p, t_f)),
        alpha: sci_vec(r.profile.alpha()),
        theta_tf: Sci(r.profile.theta(t_f)?),
        concurrence: Sci(r.concurrence),
        warm_start_concurrence: Sci(r.warm_start_concurrence),
        analytic_c_opt,
        converged: r.converged,
        objective_evals: r.objective_evals,
        history: r.history.as_deref().map(sci_vec),
        theta_samples: ThetaSamples {
            t: sci_vec(&times),
            theta: sci_vec(&theta),
        },
        reasons,
    })
}

/// Step used by `validate`; positivity holds to 1e-10 at this resolution.
pub const VALIDATE_STEP: f64 = 0.005;

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: Sci,
    limit: Sci,
    pass: bool,
}

#[derive(Serialize)]
struct ValidateReport {
    seed: u64,
    cases: usize,
    step: Sci,
    states: usize,
    checks: Vec<Check>,
    pass: bool,
}

#[derive(Default, Clone, Copy)]
struct Worst {
    trace: f64,
    negativity: f64,
    rho44_drop: f64,
    purity: f64,
    wootters: f64,
    states: usize,
}

fn validate_case(
    p: &SystemParams64,
    prof: &PulseProfile64,
    lossless: bool,
) -> Result<Worst, CliError> {
    let n = (prof.t_f() / VALIDATE_STEP - 1e-9).ceil() as usize;
    let traj = evolve_trajectory(p, prof, n, 1)?;
    let mut w = Worst {
        states: traj.len(),
        ..Default::default()
    };
    let mut prev = 0.0;
    for rho in &traj.states {
        w.trace = w.trace.max((rho.trace().re - 1.0).abs());
        w.negativity = w.negativity.max(-rho.min_eigenvalue());
        w.rho44_drop = w.rho44_drop.max(prev - rho.population(4));
        prev = rho.population(4);
        if lossless {
            w.purity = w.purity.max((rho.purity() - 1.0).abs());
        }
        let c = wootters_concurrence(&reduce(rho)?)?;
        w.wootters = w.wootters.max((c - concurrence_fast(rho)).abs());
    }
    Ok(w)
}

/// Runs the master-equation invariant checks on seeded random cases.
/// Returns the JSON report and whether every check passed.
pub fn validate(cfg: &RunConfig) -> Result<(String, bool), CliError> {
    let seed = cfg.seed.unwrap_or(0);
    let cases = cfg.cases.unwrap_or(20);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<(SystemParams64, PulseProfile64, bool)> = (0..cases)
        .map(|k| {
            let lossless = k % 4 == 0;
            let (g, k1, k2) = if lossless {
                (0.0, 0.0, 0.0)
            } else {
                (
                    rng.gen_range(0.0..1.0),
                    rng.gen_range(0.0..0.05),
                    rng.gen_range(0.0..0.05),
                )
            };
            let t_f = rng.gen_range(4.0..30.0);
            let a0 = PI / (4.0 * t_f);
            let order = rng.gen_range(0..=3usize);
            let h: Vec<f64> = (0..2 * order).map(|_| rng.gen_range(-a0..=a0)).collect();
            Ok((
                SystemParams64::new(1.0, g, k1, k2)?,
                PulseProfile64::fixed_endpoint(t_f, &h)?,
                lossless,
            ))
        })
        .collect::<Result<_, CliError>>()?;
    let reports = specs
        .par_iter()
        .map(|(p, prof, lossless)| validate_case(p, prof, *lossless))
        .collect::<Result<Vec<_>, _>>()?;
    let worst = reports.iter().fold(Worst::default(), |a, w| Worst {
        trace: a.trace.max(w.trace),
        negativity: a.negativity.max(w.negativity),
        rho44_drop: a.rho44_drop.max(w.rho44_drop),
        purity: a.purity.max(w.purity),
        wootters: a.wootters.max(w.wootters),
        states: a.states + w.states,
    });
    let check = |name, value: f64, limit: f64| Check {
        name,
        value: Sci(value),
        limit: Sci(limit),
        pass: value <= limit,
    };
    let checks = vec![
        check("trace_drift", worst.trace, 1e-9),
        check("negative_eigenvalue", worst.negativity.max(0.0), 1e-10),
        check("rho44_decrease", worst.rho44_drop.max(0.0), 1e-14),
        check("purity_loss_lossless", worst.purity, 1e-8),
        check("wootters_vs_fast", worst.wootters, 1e-10),
    ];
    let pass = checks.iter().all(|c| c.pass);
    let report = ValidateReport {
        seed,
        cases,
        step: Sci(VALIDATE_STEP),
        states: worst.states,
        checks,
        pass,
    };
    Ok((json(&report)?, pass))
}
