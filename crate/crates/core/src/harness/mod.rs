//! Experiment harness: builds problems from configs, fans runs out over
//! seeds, and emits CSV artifacts.
//!
//! Output bytes are a pure function of (config, base_seed): every run draws
//! from its own seed-derived stream, workers only parallelize independent
//! runs, and aggregation always happens in run-index order.

mod config;

pub use config::{
    ObjectiveSpec, OptimizerCfg, OracleCfg, OracleKind, RunConfig, SweepSpec, X0Spec,
};

use std::io::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use crate::diagnostics::{count_upcrossings, tail_head_ratio};
use crate::error::{Error, Result};
use crate::objectives::{
    estimate_holder, holder_scalar, quadratic, svm_objective, Objective, SvmDataset,
};
use crate::optim::{run, OptimizerSpec, RunOptions, SumConfig, Trace};
use crate::oracles::{clipped_oracle, gaussian_oracle, minibatch_oracle, NoiseSpec, Oracle};
use crate::rng::{split_stream, RT_STREAM_OFFSET};
use crate::schedules::{check_a6, sample_rt, A6Verdict, Schedule};
use crate::stats;
use crate::vec::PointVec;

/// Stream id reserved for the Hölder-constant estimator.
const HOLDER_EST_STREAM: u64 = 1 << 62;

/// An instantiated objective/oracle pair.
pub struct Problem {
    pub objective: std::sync::Arc<dyn Objective>,
    pub oracle: Box<dyn Oracle>,
}

fn build_dataset(spec: &ObjectiveSpec) -> Result<Option<(SvmDataset, f64)>> {
    Ok(match spec {
        ObjectiveSpec::SvmFixture { alpha } => Some((SvmDataset::bundled_small(), *alpha)),
        ObjectiveSpec::SvmFile { path, alpha } => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.clone(), e))?;
            Some((SvmDataset::parse_text(&text)?, *alpha))
        }
        ObjectiveSpec::SvmSynthetic {
            n,
            dim,
            separation,
            noise_std,
            alpha,
            data_seed,
        } => {
            let mut rng = split_stream(*data_seed, 0);
            Some((
                SvmDataset::synthetic_two_gaussians(*n, *dim, *separation, *noise_std, &mut rng)?,
                *alpha,
            ))
        }
        _ => None,
    })
}

/// Instantiates the objective and oracle described by a config.
pub fn build_problem(cfg: &RunConfig) -> Result<Problem> {
    let dataset = build_dataset(&cfg.objective)?;
    let objective: std::sync::Arc<dyn Objective> = match (&cfg.objective, &dataset) {
        (ObjectiveSpec::Quadratic { dim, curvature }, _) => {
            std::sync::Arc::new(quadratic(*dim, *curvature)?)
        }
        (ObjectiveSpec::HolderScalar, _) => std::sync::Arc::new(holder_scalar()),
        (_, Some((data, alpha))) => std::sync::Arc::new(svm_objective(data.clone(), *alpha)?),
        _ => unreachable!("dataset objectives always build a dataset"),
    };

    let base: Box<dyn Oracle> = match &cfg.oracle.kind {
        OracleKind::Exact => Box::new(gaussian_oracle(objective.clone(), NoiseSpec::NOISELESS)),
        OracleKind::Gaussian { sigma, relative_c } => Box::new(gaussian_oracle(
            objective.clone(),
            NoiseSpec::new(*sigma, *relative_c)?,
        )),
        OracleKind::Minibatch { batch } => {
            let (data, alpha) = dataset.ok_or_else(|| {
                Error::Config("minibatch oracle needs an svm objective".into())
            })?;
            Box::new(minibatch_oracle(data, alpha, *batch)?)
        }
    };
    let oracle = match cfg.oracle.clip {
        Some(g_max) => Box::new(clipped_oracle(base, g_max)?) as Box<dyn Oracle>,
        None => base,
    };
    Ok(Problem { objective, oracle })
}

/// Resolves the configured starting point for a given dimension.
pub fn resolve_x0(spec: &X0Spec, dim: usize) -> Result<PointVec> {
    match spec {
        X0Spec::Scale(s) => PointVec::new(vec![*s; dim]),
        X0Spec::Explicit(v) => {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: v.len(),
                });
            }
            PointVec::new(v.clone())
        }
    }
}

/// The Hölder constant used in checked inequalities: the closed-form value
/// when the objective knows one, otherwise 1.5x the empirical estimate.
pub fn effective_holder_constant(obj: &dyn Objective, base_seed: u64) -> Result<f64> {
    if let Some(a) = obj.smoothness().holder_a {
        return Ok(a);
    }
    let mut rng = split_stream(base_seed, HOLDER_EST_STREAM);
    let est = estimate_holder(obj, 2.0, 3000, &mut rng)?;
    Ok(1.5 * est.a_hat)
}

/// Per-run scalar summary.
#[derive(Debug, Clone, Copy)]
pub struct RunSummary {
    pub run: u64,
    pub final_f: f64,
    pub final_grad_norm: f64,
    /// ||grad f(x_R)||^2 at a stepsize-weighted random index.
    pub grad_sq_at_rt: f64,
    /// Tail-to-head ratio of max ||p_t||.
    pub p_tail_ratio: f64,
    /// Upcrossings of ||grad f|| from eps/2 to eps.
    pub upcross_count: u64,
    pub z_residual_max: f64,
    /// Wall time; reported on stdout only, never written to artifacts.
    pub wall_time_s: f64,
}

/// Column means or standard deviations over the per-run rows.
#[derive(Debug, Clone, Copy)]
pub struct SummaryStats {
    pub final_f: f64,
    pub final_grad_norm: f64,
    pub grad_sq_at_rt: f64,
    pub p_tail_ratio: f64,
    pub upcross_count: f64,
    pub z_residual_max: f64,
}

fn column_stats(rows: &[RunSummary]) -> (SummaryStats, SummaryStats) {
    let col = |f: fn(&RunSummary) -> f64| -> (f64, f64) {
        let vals: Vec<f64> = rows.iter().map(f).collect();
        let m = stats::mean(&vals);
        (m, stats::stddev(&vals, m))
    };
    let (m_f, s_f) = col(|r| r.final_f);
    let (m_g, s_g) = col(|r| r.final_grad_norm);
    let (m_rt, s_rt) = col(|r| r.grad_sq_at_rt);
    let (m_p, s_p) = col(|r| r.p_tail_ratio);
    let (m_u, s_u) = col(|r| r.upcross_count as f64);
    let (m_z, s_z) = col(|r| r.z_residual_max);
    (
        SummaryStats {
            final_f: m_f,
            final_grad_norm: m_g,
            grad_sq_at_rt: m_rt,
            p_tail_ratio: m_p,
            upcross_count: m_u,
            z_residual_max: m_z,
        },
        SummaryStats {
            final_f: s_f,
            final_grad_norm: s_g,
            grad_sq_at_rt: s_rt,
            p_tail_ratio: s_p,
            upcross_count: s_u,
            z_residual_max: s_z,
        },
    )
}

/// Condenses a finished trace into its summary row. The termination index
/// is drawn from a dedicated stream so it never interleaves with the
/// optimizer's randomness.
pub fn summarize(
    trace: &Trace,
    run_index: u64,
    base_seed: u64,
    upcross_epsilon: f64,
    wall_time_s: f64,
) -> Result<RunSummary> {
    let gammas = trace.gammas();
    let mut rt_stream = split_stream(base_seed, run_index | RT_STREAM_OFFSET);
    let rt = sample_rt(&gammas, &mut rt_stream)?;
    let grad_norms = trace.grad_norms();
    let (upcross_count, _) =
        count_upcrossings(&grad_norms, upcross_epsilon / 2.0, upcross_epsilon)?;
    Ok(RunSummary {
        run: run_index,
        final_f: trace.final_f,
        final_grad_norm: trace.final_grad_norm,
        grad_sq_at_rt: grad_norms[rt] * grad_norms[rt],
        p_tail_ratio: tail_head_ratio(&trace.p_norms()),
        upcross_count: upcross_count as u64,
        z_residual_max: trace.z_residual_max,
        wall_time_s,
    })
}

fn worker_count() -> usize {
    if let Ok(raw) = std::env::var("SUMOPT_WORKERS") {
        if let Ok(n) = raw.parse::<usize>() {
            return n.max(1);
        }
    }
    std::thread::available_parallelism()
        .map(|n| n.get().min(8))
        .unwrap_or(1)
}

/// Renders the per-iteration trace CSV. Column order is fixed; floats use
/// shortest round-trip formatting.
pub fn render_trace_csv(trace: &Trace) -> Vec<u8> {
    let mut out = Vec::with_capacity(64 * (trace.records.len() + 1));
    out.extend_from_slice(b"t,gamma,f_x,grad_norm,p_norm,f_z,delta_norm,sum_gamma_grad2\n");
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.t, r.gamma, r.f_x, r.grad_norm, r.p_norm, r.f_z, r.delta_norm, r.sum_gamma_grad2
        );
    }
    out
}

/// Renders the run-summary CSV: one row per run plus mean and stddev rows.
pub fn render_summary_csv(rows: &[RunSummary]) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(
        b"run,final_f,final_grad_norm,grad_sq_at_rt,p_tail_ratio,upcross_count,z_residual_max\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.run,
            r.final_f,
            r.final_grad_norm,
            r.grad_sq_at_rt,
            r.p_tail_ratio,
            r.upcross_count,
            r.z_residual_max
        );
    }
    let (mean, sd) = column_stats(rows);
    for (label, s) in [("mean", mean), ("stddev", sd)] {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            label,
            s.final_f,
            s.final_grad_norm,
            s.grad_sq_at_rt,
            s.p_tail_ratio,
            s.upcross_count,
            s.z_residual_max
        );
    }
    out
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| Error::io(path.display().to_string(), e))
}

struct BatchOutput {
    summaries: Vec<RunSummary>,
    trace_csvs: Vec<Option<Vec<u8>>>,
}

/// Runs `n_runs` seeds of one configuration cell in parallel and summarizes
/// each. On the first failure (smallest run index) returns the error plus
/// the partial trace's CSV so the caller can persist it.
#[allow(clippy::too_many_arguments)]
fn run_batch(
    problem: &Problem,
    spec: &OptimizerSpec,
    schedule: &Schedule,
    x0: &PointVec,
    iterations: u64,
    base_seed: u64,
    n_runs: u64,
    upcross_epsilon: f64,
    a_eff: Option<f64>,
    keep_trace_csv: bool,
) -> std::result::Result<BatchOutput, (Error, u64, Vec<u8>)> {
    let n = n_runs as usize;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<std::result::Result<(RunSummary, Option<Vec<u8>>), (Error, Vec<u8>)>>>> =
        Mutex::new((0..n).map(|_| None).collect());
    let opts = RunOptions {
        a_eff,
        ..RunOptions::default()
    };

    std::thread::scope(|scope| {
        for _ in 0..worker_count().min(n) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let started = Instant::now();
                let stream = split_stream(base_seed, i as u64);
                let outcome = match run(
                    spec,
                    problem.objective.as_ref(),
                    problem.oracle.as_ref(),
                    schedule,
                    x0.clone(),
                    iterations,
                    &stream,
                    &opts,
                ) {
                    Ok(trace) => {
                        let wall = started.elapsed().as_secs_f64();
                        match summarize(&trace, i as u64, base_seed, upcross_epsilon, wall) {
                            Ok(summary) => {
                                let csv = keep_trace_csv.then(|| render_trace_csv(&trace));
                                Ok((summary, csv))
                            }
                            Err(e) => Err((e, render_trace_csv(&trace))),
                        }
                    }
                    Err(failure) => {
                        Err((failure.error, render_trace_csv(&failure.partial)))
                    }
                };
                slots.lock().expect("slots lock").get_mut(i).map(|s| *s = Some(outcome));
            });
        }
    });

    let slots = slots.into_inner().expect("slots lock");
    let mut summaries = Vec::with_capacity(n);
    let mut trace_csvs = Vec::with_capacity(n);
    for (i, slot) in slots.into_iter().enumerate() {
        match slot.expect("every run index was processed") {
            Ok((summary, csv)) => {
                summaries.push(summary);
                trace_csvs.push(csv);
            }
            Err((error, partial_csv)) => return Err((error, i as u64, partial_csv)),
        }
    }
    Ok(BatchOutput {
        summaries,
        trace_csvs,
    })
}

/// Outcome of `execute_run`.
pub struct ExecutionReport {
    pub summaries: Vec<RunSummary>,
    pub mean: SummaryStats,
    pub stddev: SummaryStats,
    pub artifact_paths: Vec<std::path::PathBuf>,
}

fn optimizer_spec(cfg: &OptimizerCfg) -> Result<OptimizerSpec> {
    Ok(match cfg {
        OptimizerCfg::Sum { beta, s } => OptimizerSpec::Sum(SumConfig::new(*beta, *s)?),
        OptimizerCfg::Adam { beta } => OptimizerSpec::Adam { beta: *beta },
    })
}

/// Runs a config end to end: admissibility gate, seed fan-out, artifacts.
/// Writes `trace_<run>.csv` per run when diagnostics are full, and
/// `summary.csv` always. A diverged run leaves its partial trace behind.
pub fn execute_run(cfg: &RunConfig) -> Result<ExecutionReport> {
    let problem = build_problem(cfg)?;
    let schedule = cfg.schedule.clone().resolved(cfg.iterations);
    let alpha = problem.objective.smoothness().alpha;
    if cfg.require_a6 {
        let verdict = check_a6(&schedule, alpha, cfg.iterations)?;
        if verdict != A6Verdict::Valid {
            return Err(Error::Config(format!(
                "schedule fails the admissibility gate: {verdict}"
            )));
        }
    }
    let spec = optimizer_spec(&cfg.optimizer)?;
    let x0 = resolve_x0(&cfg.x0, problem.objective.dim())?;
    let a_eff = effective_holder_constant(problem.objective.as_ref(), cfg.base_seed)?;

    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| Error::io(cfg.out_dir.display().to_string(), e))?;

    let batch = run_batch(
        &problem,
        &spec,
        &schedule,
        &x0,
        cfg.iterations,
        cfg.base_seed,
        cfg.n_runs,
        cfg.upcross_epsilon,
        Some(a_eff),
        cfg.diagnostics_full,
    );
    let batch = match batch {
        Ok(b) => b,
        Err((error, run_index, partial_csv)) => {
            let path = cfg.out_dir.join(format!("trace_{run_index}.csv"));
            write_file(&path, &partial_csv)?;
            return Err(error);
        }
    };

    let mut artifact_paths = Vec::new();
    for (i, csv) in batch.trace_csvs.iter().enumerate() {
        if let Some(bytes) = csv {
            let path = cfg.out_dir.join(format!("trace_{i}.csv"));
            write_file(&path, bytes)?;
            artifact_paths.push(path);
        }
    }
    let summary_path = cfg.out_dir.join("summary.csv");
    write_file(&summary_path, &render_summary_csv(&batch.summaries))?;
    artifact_paths.push(summary_path);

    let (mean, stddev) = column_stats(&batch.summaries);
    Ok(ExecutionReport {
        summaries: batch.summaries,
        mean,
        stddev,
        artifact_paths,
    })
}

/// One aggregated grid cell of a sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub cell: u64,
    pub iterations: u64,
    pub beta: f64,
    pub s: f64,
    pub schedule: String,
    pub mean: SummaryStats,
}

fn schedule_label(s: &Schedule) -> String {
    match s {
        Schedule::PowerDecay { c, r } => format!("power_decay:c={c},r={r}"),
        Schedule::ConstantHorizon { horizon, alpha } => match horizon {
            Some(h) => format!("constant_horizon:T={h},alpha={alpha}"),
            None => format!("constant_horizon:T=auto,alpha={alpha}"),
        },
        Schedule::ExplicitList(g) => format!("list:len={}", g.len()),
        Schedule::AdaptiveAdam(p) => format!(
            "adam:beta_prime={},kappa={},eps={}",
            p.beta_prime, p.kappa, p.eps
        ),
    }
}

/// Runs the grid defined by the config's [sweep] section: the cartesian
/// product of horizons, betas, s values, and schedules, each cell aggregated
/// over the shared per-run seed streams. Writes `sweep_summary.csv`.
pub fn execute_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    let sweep = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config("config has no [sweep] section".into()))?;
    let problem = build_problem(cfg)?;
    let alpha = problem.objective.smoothness().alpha;
    let x0 = resolve_x0(&cfg.x0, problem.objective.dim())?;
    let a_eff = effective_holder_constant(problem.objective.as_ref(), cfg.base_seed)?;

    let (base_beta, base_s) = match cfg.optimizer {
        OptimizerCfg::Sum { beta, s } => (beta, s),
        OptimizerCfg::Adam { beta } => (beta, 0.0),
    };
    let horizons = if sweep.horizons.is_empty() {
        vec![cfg.iterations]
    } else {
        sweep.horizons.clone()
    };
    let betas = if sweep.betas.is_empty() {
        vec![base_beta]
    } else {
        sweep.betas.clone()
    };
    let s_values = if sweep.s_values.is_empty() {
        vec![base_s]
    } else {
        sweep.s_values.clone()
    };
    let schedules = if sweep.schedules.is_empty() {
        vec![cfg.schedule.clone()]
    } else {
        sweep.schedules.clone()
    };
    let total = horizons.len() * betas.len() * s_values.len() * schedules.len();
    if total > 4096 {
        return Err(Error::Config(format!(
            "sweep grid has {total} cells; cap is 4096"
        )));
    }
    if !s_values.is_empty() && matches!(cfg.optimizer, OptimizerCfg::Adam { .. })
        && !sweep.s_values.is_empty()
    {
        return Err(Error::Config("s sweep only applies to the sum optimizer".into()));
    }

    let mut rows = Vec::with_capacity(total);
    let mut cell = 0u64;
    for &iterations in &horizons {
        if iterations == 0 {
            return Err(Error::Config("sweep horizon must be at least 1".into()));
        }
        for &beta in &betas {
            for &s in &s_values {
                for sched in &schedules {
                    let spec = match cfg.optimizer {
                        OptimizerCfg::Sum { .. } => OptimizerSpec::Sum(SumConfig::new(beta, s)?),
                        OptimizerCfg::Adam { .. } => OptimizerSpec::Adam { beta },
                    };
                    let schedule = sched.clone().resolved(iterations);
                    if cfg.require_a6 {
                        let verdict = check_a6(&schedule, alpha, iterations)?;
                        if verdict != A6Verdict::Valid {
                            return Err(Error::Config(format!(
                                "sweep cell {cell} schedule fails the admissibility gate: {verdict}"
                            )));
                        }
                    }
                    let batch = run_batch(
                        &problem,
                        &spec,
                        &schedule,
                        &x0,
                        iterations,
                        cfg.base_seed,
                        cfg.n_runs,
                        cfg.upcross_epsilon,
                        Some(a_eff),
                        false,
                    )
                    .map_err(|(error, _, _)| error)?;
                    let (mean, _) = column_stats(&batch.summaries);
                    rows.push(SweepRow {
                        cell,
                        iterations,
                        beta,
                        s,
                        schedule: schedule_label(sched),
                        mean,
                    });
                    cell += 1;
                }
            }
        }
    }

    std::fs::create_dir_all(&cfg.out_dir)
        .map_err(|e| Error::io(cfg.out_dir.display().to_string(), e))?;
    let mut out = Vec::new();
    out.extend_from_slice(
        b"cell,T,beta,s,schedule,mean_final_f,mean_final_grad_norm,mean_grad_sq_at_rt,mean_p_tail_ratio,mean_upcross_count,mean_z_residual_max\n",
    );
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.cell,
            r.iterations,
            r.beta,
            r.s,
            r.schedule,
            r.mean.final_f,
            r.mean.final_grad_norm,
            r.mean.grad_sq_at_rt,
            r.mean.p_tail_ratio,
            r.mean.upcross_count,
            r.mean.z_residual_max
        );
    }
    write_file(&cfg.out_dir.join("sweep_summary.csv"), &out)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn smoke_config(out: &Path) -> RunConfig {
        RunConfig::parse(&format!(
            "\
[objective]
kind = quadratic
dim = 2
curvature = 1.0

[oracle]
kind = gaussian
sigma = 0.3

[optimizer]
kind = sum
beta = 0.5
s = 0.0

[schedule]
spec = power_decay:c=0.3,r=0.8

[run]
T = 50
base_seed = 11
n_runs = 2
diagnostics = full
out_dir = {}
",
            out.display()
        ))
        .unwrap()
    }

    #[test]
    fn execute_run_writes_expected_artifacts() {
        let dir = std::env::temp_dir().join(format!("sumopt-harness-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let cfg = smoke_config(&dir);
        let report = execute_run(&cfg).unwrap();
        assert_eq!(report.summaries.len(), 2);
        assert!(dir.join("trace_0.csv").exists());
        assert!(dir.join("trace_1.csv").exists());
        let summary = std::fs::read_to_string(dir.join("summary.csv")).unwrap();
        let lines: Vec<&str> = summary.lines().collect();
        // header + 2 runs + mean + stddev
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("run,final_f"));
        assert!(lines[3].starts_with("mean,"));
        assert!(lines[4].starts_with("stddev,"));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn repeated_execution_is_byte_identical() {
        let dir_a = std::env::temp_dir().join(format!("sumopt-det-a-{}", std::process::id()));
        let dir_b = std::env::temp_dir().join(format!("sumopt-det-b-{}", std::process::id()));
        for d in [&dir_a, &dir_b] {
            let _ = std::fs::remove_dir_all(d);
        }
        let mut cfg_a = smoke_config(&dir_a);
        cfg_a.out_dir = dir_a.clone();
        let mut cfg_b = smoke_config(&dir_b);
        cfg_b.out_dir = dir_b.clone();
        execute_run(&cfg_a).unwrap();
        execute_run(&cfg_b).unwrap();
        for name in ["trace_0.csv", "trace_1.csv", "summary.csv"] {
            let a = std::fs::read(dir_a.join(name)).unwrap();
            let b = std::fs::read(dir_b.join(name)).unwrap();
            assert_eq!(a, b, "artifact {name} differs");
        }
        for d in [&dir_a, &dir_b] {
            let _ = std::fs::remove_dir_all(d);
        }
    }

    #[test]
    fn require_a6_refuses_summable_schedule() {
        let dir = std::env::temp_dir().join(format!("sumopt-a6-{}", std::process::id()));
        let mut cfg = smoke_config(&dir);
        cfg.schedule = Schedule::power_decay(1.0, 2.0).unwrap();
        cfg.require_a6 = true;
        let err = execute_run(&cfg).unwrap_err();
        match err {
            Error::Config(msg) => assert!(msg.contains("invalid_summable"), "{msg}"),
            other => panic!("expected config error, got {other}"),
        }
    }

    #[test]
    fn divergent_run_fails_with_exit3_class_error_and_partial_trace() {
        let dir = std::env::temp_dir().join(format!("sumopt-div-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let mut cfg = smoke_config(&dir);
        cfg.schedule = Schedule::explicit(vec![3.0; 50]).unwrap();
        cfg.oracle.kind = OracleKind::Exact;
        let err = execute_run(&cfg).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }), "{err}");
        assert!(dir.join("trace_0.csv").exists(), "partial trace missing");
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn sweep_produces_one_row_per_cell() {
        let dir = std::env::temp_dir().join(format!("sumopt-sweep-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let mut cfg = smoke_config(&dir);
        cfg.n_runs = 2;
        cfg.sweep = Some(SweepSpec {
            horizons: vec![20, 40],
            betas: vec![],
            s_values: vec![0.0, 1.0, 2.0],
            schedules: vec![],
        });
        let rows = execute_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        let text = std::fs::read_to_string(dir.join("sweep_summary.csv")).unwrap();
        assert_eq!(text.lines().count(), 7);
        let _ = std::fs::remove_dir_all(&dir);
    }
}
