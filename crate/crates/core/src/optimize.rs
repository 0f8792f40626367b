//! Optimal pulses: the closed-form optimum of the PAP concurrence, its
//! `N -> infinity` limit, the optimal duration, and a simplex search against
//! the exact master-equation dynamics.

use rayon::prelude::*;

use crate::dynamics::{evolve_final, min_steps};
use crate::entanglement::concurrence_fast;
use crate::error::{invalid, Error, Result};
use crate::model::{PulseProfile, SystemParams};
use crate::nelder_mead::NelderMead;
use crate::perturbation::{boundary_coefficients, concurrence_perturbative_pap};
use crate::scalar::{lit, to_f64, Real};

/// Denominators closer to zero than this are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

fn check_t_f<T: Real>(t_f: T) -> Result<()> {
    if t_f > T::zero() && t_f.is_finite() {
        Ok(())
    } else {
        Err(invalid("t_f", "must be positive and finite"))
    }
}

/// Optimal Fourier coefficients `[a_0, a_1, .., a_2N]` of the PAP concurrence
/// at fixed endpoint. All even harmonics share one value and all odd
/// harmonics another.
pub fn alpha_opt<T: Real>(params: &SystemParams<T>, t_f: T, order: usize) -> Result<Vec<T>> {
    check_t_f(t_f)?;
    let a0 = PulseProfile::endpoint_rate(t_f);
    if order == 0 {
        return Ok(vec![a0]);
    }
    let (a1, a2) = boundary_coefficients(params.g0, params.gamma, t_f);
    let two: T = lit(2.0);
    let four: T = lit(4.0);
    let n: T = lit(order as f64);
    let s = params.gamma * t_f / n; // gamma t_f / N
    let h = s / two; // gamma t_f / 2N
    let core = a1 * a1 + four * a2 - four;
    let denominator = core + (a2 - two) * s - h * h;
    if denominator.abs() <= lit(DEGENERACY_TOL) {
        return Err(Error::Degenerate {
            denominator: to_f64(denominator),
        });
    }
    let prefactor = -T::PI() / (four * n * t_f);
    let even = prefactor * (core + (a1 + a2 - two) * h) / denominator;
    let odd = prefactor * (a2 * h) / denominator;
    let mut alpha = Vec::with_capacity(2 * order + 1);
    alpha.push(a0);
    alpha.extend((1..=2 * order).map(|k| if k % 2 == 0 { even } else { odd }));
    Ok(alpha)
}

/// PAP concurrence at the optimal coefficients of order `N`:
///
/// `1 - k t_f - pi^2 g / (16 G0^2 t_f) * P / Q` with
/// `P = (4N^2 + 2N) X + g t_f [A1 + (A2 - 2)(4N + 1)] - g^2 t_f^2`,
/// `Q = 4N^2 X + 4 (A2 - 2) g N t_f - g^2 t_f^2`, `X = A1^2 + 4 A2 - 4`.
pub fn c_opt_closed_form<T: Real>(params: &SystemParams<T>, t_f: T, order: usize) -> Result<T> {
    check_t_f(t_f)?;
    let kappa = params.symmetric_kappa()?;
    if order == 0 {
        return concurrence_perturbative_pap(params, &PulseProfile::linear_ramp(t_f)?);
    }
    // same degeneracy as the coefficients (Q = 4 N^2 times their denominator)
    alpha_opt(params, t_f, order)?;
    let (a1, a2) = boundary_coefficients(params.g0, params.gamma, t_f);
    let two: T = lit(2.0);
    let four: T = lit(4.0);
    let n: T = lit(order as f64);
    let gt = params.gamma * t_f;
    let x = a1 * a1 + four * a2 - four;
    let p = (four * n * n + two * n) * x + gt * (a1 + (a2 - two) * (four * n + T::one())) - gt * gt;
    let q = four * n * n * x + four * (a2 - two) * gt * n - gt * gt;
    let g0 = params.g0;
    Ok(T::one()
        - kappa * t_f
        - T::PI() * T::PI() * params.gamma / (lit::<T>(16.0) * g0 * g0 * t_f) * p / q)
}

/// `1 - k t_f - pi^2 g / (16 G0^2 t_f)`: the optimum over arbitrary rate profiles.
pub fn c_opt_limit<T: Real>(params: &SystemParams<T>, t_f: T) -> Result<T> {
    check_t_f(t_f)?;
    let kappa = params.symmetric_kappa()?;
    let g0 = params.g0;
    Ok(
        T::one()
            - kappa * t_f
            - T::PI() * T::PI() * params.gamma / (lit::<T>(16.0) * g0 * g0 * t_f),
    )
}

/// Optimal duration `pi / (2 k sqrt(C))` and the bound `1 - pi / sqrt(C)`,
/// with `C = 4 G0^2 / (g k)` the cooperativity.
pub fn t_f_opt_and_c_max<T: Real>(params: &SystemParams<T>) -> Result<(T, T)> {
    let kappa = params.symmetric_kappa()?;
    let coop = params.cooperativity()?;
    let root = coop.sqrt();
    let t_f_opt = T::PI() / (lit::<T>(2.0) * kappa * root);
    Ok((t_f_opt, T::one() - T::PI() / root))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NumericOptions {
    /// RK4 steps; `None` uses the smallest count allowed by the step guard.
    pub n_steps: Option<usize>,
    /// Objective evaluations per simplex start.
    pub budget: usize,
    pub free_endpoint: bool,
    pub record_history: bool,
}

impl NumericOptions {
    pub fn new(budget: usize) -> Self {
        Self {
            n_steps: None,
            budget,
            free_endpoint: false,
            record_history: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T: Real> {
    pub profile: PulseProfile<T>,
    pub concurrence: T,
    pub objective_evals: usize,
    pub converged: bool,
    pub history: Option<Vec<T>>,
    pub free_endpoint: bool,
    /// Exact concurrence of the analytic warm start (the linear ramp when no
    /// analytic coefficients exist).
    pub warm_start_concurrence: T,
}

/// Exact concurrence `2 |rho_31(t_f)|` for a profile.
pub fn exact_concurrence<T: Real>(
    params: &SystemParams<T>,
    profile: &PulseProfile<T>,
    n_steps: usize,
) -> Result<T> {
    Ok(concurrence_fast(&evolve_final(params, profile, n_steps)?))
}

/// Maximizes the exact concurrence over the harmonics (and `a_0` when
/// `free_endpoint`) with Nelder-Mead started from the analytic optimum and
/// from the linear ramp, keeping the better run.
pub fn optimize_numerical<T: Real>(
    params: &SystemParams<T>,
    t_f: T,
    order: usize,
    opts: &NumericOptions,
) -> Result<OptimizationResult<T>> {
    check_t_f(t_f)?;
    let dims = 2 * order + 1;
    if opts.budget < 50 * dims {
        return Err(invalid(
            "budget",
            format!(
                "need at least {} evaluations, got {}",
                50 * dims,
                opts.budget
            ),
        ));
    }
    let n_steps = opts.n_steps.unwrap_or_else(|| min_steps(params, t_f));
    let a0 = PulseProfile::endpoint_rate(t_f);

    let ramp = {
        let mut v = vec![T::zero(); dims];
        v[0] = a0;
        v
    };
    let warm = match alpha_opt(params, t_f, order) {
        Ok(a) => a,
        Err(Error::Degenerate { .. }) => ramp.clone(),
        Err(e) => return Err(e),
    };

    let free = opts.free_endpoint;
    let to_profile = move |x: &[T]| -> Result<PulseProfile<T>> {
        if free {
            PulseProfile::new(t_f, x.to_vec())
        } else {
            PulseProfile::fixed_endpoint(t_f, x)
        }
    };
    let pack = |alpha: &[T]| {
        if free {
            alpha.to_vec()
        } else {
            alpha[1..].to_vec()
        }
    };

    let simplex = NelderMead {
        initial_step: lit::<T>(0.1) * a0,
        x_tol: lit(1e-8),
        max_evals: opts.budget,
        record_history: opts.record_history,
    };
    let run = |start: Vec<T>| {
        simplex.minimize(
            |x| Ok(-exact_concurrence(params, &to_profile(x)?, n_steps)?),
            &start,
        )
    };
    let (from_warm, from_ramp) = rayon::join(|| run(pack(&warm)), || run(pack(&ramp)));
    let (from_warm, from_ramp) = (from_warm?, from_ramp?);
    let warm_start_concurrence =
        exact_concurrence(params, &PulseProfile::new(t_f, warm.clone())?, n_steps)?;

    let objective_evals = from_warm.evals + from_ramp.evals;
    let best = if from_ramp.value < from_warm.value {
        from_ramp
    } else {
        from_warm
    };
    Ok(OptimizationResult {
        profile: to_profile(&best.x)?,
        concurrence: -best.value,
        objective_evals,
        converged: best.converged,
        history: opts
            .record_history
            .then(|| best.history.iter().map(|v| -*v).collect()),
        free_endpoint: free,
        warm_start_concurrence,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Analytic,
    Numeric,
    Both,
}

impl SweepMode {
    fn analytic(self) -> bool {
        matches!(self, SweepMode::Analytic | SweepMode::Both)
    }

    fn numeric(self) -> bool {
        matches!(self, SweepMode::Numeric | SweepMode::Both)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow<T: Real> {
    pub t_f: T,
    /// Closed-form optimum per requested order (`None` when degenerate).
    pub analytic: Option<Vec<Option<T>>>,
    /// Numerically optimized exact concurrence per requested order.
    pub numeric: Option<Vec<T>>,
    pub c_opt_limit: T,
    pub c_max: Option<T>,
    /// Every analytic value is finite and inside `[0, 1]`.
    pub valid: bool,
}

/// Evaluates the optima on a duration grid. Grid points run in parallel on the
/// current rayon pool; rows come back in grid order.
pub fn sweep_tf<T: Real>(
    params: &SystemParams<T>,
    orders: &[usize],
    tf_grid: &[T],
    mode: SweepMode,
    opts: &NumericOptions,
) -> Result<Vec<SweepRow<T>>> {
    if tf_grid.is_empty() {
        return Err(invalid("tf_grid", "must not be empty"));
    }
    if tf_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("tf_grid", "must be strictly increasing"));
    }
    params.symmetric_kappa()?;
    let c_max = t_f_opt_and_c_max(params).ok().map(|(_, c)| c);
    tf_grid
        .par_iter()
        .map(|&t_f| {
            let analytic = if mode.analytic() {
                let values = orders
                    .iter()
                    .map(|&n| match c_opt_closed_form(params, t_f, n) {
                        Ok(c) => Ok(Some(c)),
                        Err(Error::Degenerate { .. }) => Ok(None),
                        Err(e) => Err(e),
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(values)
            } else {
                None
            };
            let numeric = if mode.numeric() {
                let values = orders
                    .iter()
                    .map(|&n| optimize_numerical(params, t_f, n, opts).map(|r| r.concurrence))
                    .collect::<Result<Vec<_>>>()?;
                Some(values)
            } else {
                None
            };
            let valid = analytic.as_ref().is_none_or(|v| {
                v.iter()
                    .all(|c| matches!(c, Some(c) if *c >= T::zero() && *c <= T::one()))
            });
            Ok(SweepRow {
                t_f,
                analytic,
                numeric,
                c_opt_limit: c_opt_limit(params, t_f)?,
                c_max,
                valid,
            })
        })
        .collect()
}

/// `n` log-spaced points over `[lo, hi]`.
pub fn log_grid<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (ll, lh) = (lo.ln(), hi.ln());
            (0..n)
                .map(|k| {
                    if k + 1 == n {
                        hi
                    } else {
                        (ll + (lh - ll) * lit::<T>(k as f64) / lit::<T>((n - 1) as f64)).exp()
                    }
                })
                .collect()
        }
    }
}
