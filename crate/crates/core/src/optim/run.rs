//! Single-run orchestration with full diagnostics.
//!
//! A run is strictly sequential. All randomness at iteration t comes from a
//! substream tagged with t, so the trace is a pure function of
//! (config, base_seed, stream_id) and any single iteration can be replayed
//! in isolation.

use crate::diagnostics::{
    self, fx_fz_gap, update_p, v_recursion_residual, z_step_residual, DiagnosticState, TraceRecord,
};
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::oracles::Oracle;
use crate::optim::{adam_step, sum_step, AdamParams, AdamState, SumConfig, SumState};
use crate::rng::RngStream;
use crate::schedules::{gamma_at, Schedule};
use crate::vec::PointVec;

/// Which stepper drives the run. The Adam momentum factor pairs with the
/// schedule-side `adam:` parameters at run time.
#[derive(Debug, Clone, Copy)]
pub enum OptimizerSpec {
    Sum(SumConfig),
    Adam { beta: f64 },
}

/// Knobs for a single run.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Effective Hölder constant for the value-gap check; None skips it.
    pub a_eff: Option<f64>,
    /// Keep the drawn gradient sequence (needed by equivalence checks).
    pub record_g: bool,
    /// Keep the iterate sequence x_0..=x_T.
    pub record_x: bool,
    /// Abort with a divergence error when ||x|| exceeds this.
    pub divergence_norm: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            a_eff: None,
            record_g: false,
            record_x: false,
            divergence_norm: 1e12,
        }
    }
}

/// Complete record of one run.
#[derive(Debug, Clone)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    /// Momentum factor of the executed update.
    pub beta: f64,
    /// Reduction parameter (0 for Adam runs).
    pub s: f64,
    /// Hölder exponent of the objective, used in the running p-sums.
    pub objective_alpha: f64,
    /// True when the oracle reports clipping-induced bias.
    pub biased_oracle: bool,
    /// For Adam runs, the factor (1-beta) linking the recorded stepsize to
    /// the raw update coefficient; None for deterministic-schedule runs.
    pub adam_raw_factor: Option<f64>,
    /// Max normalized one-step residual of the z recursion.
    pub z_residual_max: f64,
    /// Max normalized disagreement between direct and recursive v_t.
    pub v_agreement_max: f64,
    /// Value-gap bound violations (counted only when a_eff was supplied).
    pub fx_fz_violations: u64,
    /// For Adam runs against a norm-bounded oracle: whether every recorded
    /// stepsize stayed inside its analytic sandwich.
    pub stepsize_in_bounds: Option<bool>,
    /// Drawn gradients, when requested.
    pub g_seq: Option<Vec<PointVec>>,
    /// Iterates x_0..=x_T, when requested.
    pub x_seq: Option<Vec<PointVec>>,
    pub final_x: PointVec,
    pub final_f: f64,
    pub final_grad_norm: f64,
}

impl Trace {
    /// Exact gradient norms per iteration, in order.
    pub fn grad_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.grad_norm).collect()
    }

    /// Momentum-residue norms per iteration, in order.
    pub fn p_norms(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.p_norm).collect()
    }

    /// Stepsizes per iteration, in order.
    pub fn gammas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.gamma).collect()
    }
}

/// A failed run carrying whatever was recorded before the failure.
#[derive(Debug)]
pub struct RunFailure {
    pub error: Error,
    pub partial: Box<Trace>,
}

impl std::fmt::Display for RunFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "run failed after {} recorded iterations: {}",
            self.partial.records.len(),
            self.error
        )
    }
}

/// Executes `iterations` steps and returns the trace, or the error plus the
/// partial trace on divergence or evaluation failure.
pub fn run(
    spec: &OptimizerSpec,
    obj: &dyn Objective,
    oracle: &dyn Oracle,
    schedule: &Schedule,
    x0: PointVec,
    iterations: u64,
    run_stream: &RngStream,
    opts: &RunOptions,
) -> std::result::Result<Trace, RunFailure> {
    let beta = match spec {
        OptimizerSpec::Sum(cfg) => cfg.beta,
        OptimizerSpec::Adam { beta } => *beta,
    };
    let s = match spec {
        OptimizerSpec::Sum(cfg) => cfg.s,
        OptimizerSpec::Adam { .. } => 0.0,
    };
    let mut trace = Trace {
        records: Vec::with_capacity(iterations as usize),
        beta,
        s,
        objective_alpha: obj.smoothness().alpha,
        biased_oracle: oracle.is_biased(),
        adam_raw_factor: match spec {
            OptimizerSpec::Adam { beta } => Some(1.0 - beta),
            OptimizerSpec::Sum(_) => None,
        },
        z_residual_max: 0.0,
        v_agreement_max: 0.0,
        fx_fz_violations: 0,
        stepsize_in_bounds: None,
        g_seq: if opts.record_g { Some(Vec::new()) } else { None },
        x_seq: if opts.record_x { Some(vec![x0.clone()]) } else { None },
        final_x: x0.clone(),
        final_f: f64::NAN,
        final_grad_norm: f64::NAN,
    };
    match run_inner(spec, obj, oracle, schedule, x0, iterations, run_stream, opts, &mut trace) {
        Ok(()) => Ok(trace),
        Err(error) => Err(RunFailure {
            error,
            partial: Box::new(trace),
        }),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_inner(
    spec: &OptimizerSpec,
    obj: &dyn Objective,
    oracle: &dyn Oracle,
    schedule: &Schedule,
    x0: PointVec,
    iterations: u64,
    run_stream: &RngStream,
    opts: &RunOptions,
    trace: &mut Trace,
) -> Result<()> {
    if iterations == 0 {
        return Err(Error::invalid("iterations", "must run at least one step"));
    }
    if x0.dim() != obj.dim() || oracle.dim() != obj.dim() {
        return Err(Error::DimensionMismatch {
            left: obj.dim(),
            right: x0.dim(),
        });
    }
    let schedule = schedule.clone().resolved(iterations);

    enum Stepper {
        Sum(SumConfig, SumState),
        Adam(AdamState, f64), // state and ||g_{t-1}||^2
    }
    let mut stepper = match (spec, &schedule) {
        (OptimizerSpec::Sum(cfg), Schedule::AdaptiveAdam(_)) => {
            let _ = cfg;
            return Err(Error::Config(
                "the unified-momentum stepper needs a deterministic schedule".into(),
            ));
        }
        (OptimizerSpec::Sum(cfg), _) => Stepper::Sum(*cfg, SumState::new(x0.clone())),
        (OptimizerSpec::Adam { beta }, Schedule::AdaptiveAdam(sp)) => {
            let params = AdamParams::new(*beta, sp.beta_prime, sp.kappa, sp.eps)?;
            Stepper::Adam(AdamState::new(x0.clone(), params)?, 0.0)
        }
        (OptimizerSpec::Adam { .. }, _) => {
            return Err(Error::Config(
                "the adam stepper needs the adam: schedule".into(),
            ));
        }
    };

    let diag_cfg = SumConfig::new(trace.beta, trace.s)?;
    let alpha = trace.objective_alpha;
    let mut diag = DiagnosticState::start(&x0, trace.beta)?;
    let mut x = x0;
    let mut sandwich_ok = true;

    for t in 0..iterations {
        let grad = obj.grad(&x)?;
        let grad_norm = grad.norm();
        let f_x = obj.value(&x)?;
        let f_z = obj.value(&diag.z)?;

        let mut iter_rng = run_stream.substream(t);
        let sample = oracle.sample(&x, t, &mut iter_rng)?;
        let delta_norm = sample.g.sub(&grad)?.norm();

        // Advance the stepper; gamma_alg is the Algorithm-1 stepsize, while
        // gamma_record is what lands in the trace (for Adam the two differ
        // by the (1-beta) factor folded into the update coefficient).
        let (x_new, gamma_alg, gamma_record) = match &mut stepper {
            Stepper::Sum(cfg, state) => {
                let gamma = gamma_at(&schedule, t)?;
                let next = sum_step(state, cfg, &sample, gamma)?;
                let x_new = next.x.clone();
                *state = next;
                (x_new, gamma, gamma)
            }
            Stepper::Adam(state, g_prev_norm_sq) => {
                let (next, gamma_used) = adam_step(state, &sample, *g_prev_norm_sq)?;
                let params = state.params;
                if let Some(g_bound) = oracle.bound() {
                    let decay = ((t + 1) as f64).powf(0.5 + params.eps);
                    let lo = 1.0 / (decay * (params.kappa + g_bound));
                    let hi = 1.0 / (decay * params.kappa);
                    if gamma_used < lo * (1.0 - 1e-12) || gamma_used > hi * (1.0 + 1e-12) {
                        sandwich_ok = false;
                    }
                }
                let x_new = next.x.clone();
                *g_prev_norm_sq = sample.g.norm_sq();
                *state = next;
                (x_new, gamma_used * (1.0 - params.beta), gamma_used)
            }
        };

        diag.accumulate(gamma_record, grad_norm * grad_norm, alpha);
        let record = TraceRecord {
            t,
            gamma: gamma_record,
            f_x,
            grad_norm,
            p_norm: diag.p.norm(),
            f_z,
            delta_norm,
            sum_gamma_grad2: diag.sum_gamma_grad2,
        };
        if let Some(a_eff) = opts.a_eff {
            let (gap, bound) = fx_fz_gap(&record, a_eff, alpha);
            if gap > bound + diagnostics::GAP_SLACK {
                trace.fx_fz_violations += 1;
            }
        }
        trace.records.push(record);
        if let Some(gs) = trace.g_seq.as_mut() {
            gs.push(sample.g.clone());
        }
        if let Some(xs) = trace.x_seq.as_mut() {
            xs.push(x_new.clone());
        }

        let diag_next = update_p(&diag, &diag_cfg, &x_new, &x, &sample.g, gamma_alg)?;
        let z_resid = z_step_residual(&diag.z, &diag_next.z, &sample.g, gamma_alg, trace.beta)?;
        if z_resid > trace.z_residual_max {
            trace.z_residual_max = z_resid;
        }
        if let Some(v_resid) =
            v_recursion_residual(&diag, &diag_next, &diag_cfg, &sample.g, gamma_alg)?
        {
            if v_resid > trace.v_agreement_max {
                trace.v_agreement_max = v_resid;
            }
        }
        diag = diag_next;
        x = x_new;
        trace.final_x = x.clone();

        if x.norm() > opts.divergence_norm {
            return Err(Error::Divergence {
                iteration: t,
                detail: format!("iterate norm {} exceeded {}", x.norm(), opts.divergence_norm),
            });
        }
    }

    if matches!(stepper, Stepper::Adam(..)) && oracle.bound().is_some() {
        trace.stepsize_in_bounds = Some(sandwich_ok);
    }
    trace.final_f = obj.value(&x)?;
    trace.final_grad_norm = obj.grad(&x)?.norm();
    Ok(())
}
