//! Per-iteration convergence diagnostics and trace analyzers.
//!
//! The momentum residue p_t = (beta/(1-beta))(x_t - x_{t-1} + s gamma g)
//! measures how far the iterate sits from the auxiliary sequence
//! z_t = x_t + p_t, which follows the exact descent recursion
//! z_{t+1} = z_t - (gamma_t/(1-beta)) g_t. Tracking both, together with the
//! running sums of gamma ||grad f||^2 and of powers of ||p||, turns the
//! convergence argument's intermediate objects into measurable quantities.

use crate::error::{Error, Result};
use crate::optim::SumConfig;
use crate::stats;
use crate::vec::PointVec;

/// Absolute slack added to inequality checks to absorb float rounding.
pub const GAP_SLACK: f64 = 1e-9;

/// The diagnostic quantities carried alongside an optimizer run.
#[derive(Debug, Clone)]
pub struct DiagnosticState {
    /// Momentum residue p_t; zero at t = 0 and identically zero when beta = 0.
    pub p: PointVec,
    /// Rescaled residue v_t = ((1-beta)/beta) p_t; undefined at beta = 0.
    pub v_vec: Option<PointVec>,
    /// z_t = x_t + p_t.
    pub z: PointVec,
    /// Running sum of gamma_i ||grad f(x_i)||^2.
    pub sum_gamma_grad2: f64,
    /// Running sum of ||p_i||^2.
    pub sum_p2: f64,
    /// Running sum of gamma_i ||p_i||^{2 alpha}.
    pub sum_gamma_p2alpha: f64,
}

impl DiagnosticState {
    pub fn start(x0: &PointVec, beta: f64) -> Result<DiagnosticState> {
        let p = PointVec::zeros(x0.dim())?;
        let v_vec = if beta > 0.0 {
            Some(PointVec::zeros(x0.dim())?)
        } else {
            None
        };
        Ok(DiagnosticState {
            p,
            v_vec,
            z: x0.clone(),
            sum_gamma_grad2: 0.0,
            sum_p2: 0.0,
            sum_gamma_p2alpha: 0.0,
        })
    }

    /// Folds iteration t's stepsize and exact gradient norm into the
    /// running sums. Call once per iteration, before stepping.
    pub fn accumulate(&mut self, gamma: f64, grad_norm_sq: f64, alpha: f64) {
        self.sum_gamma_grad2 += gamma * grad_norm_sq;
        let p_sq = self.p.norm_sq();
        self.sum_p2 += p_sq;
        self.sum_gamma_p2alpha += gamma * p_sq.powf(alpha);
    }
}

/// Advances the diagnostics after a completed step, computing p_{t+1} from
/// its definition. `gamma_old` is the Algorithm-stepsize used for that step.
pub fn update_p(
    prev: &DiagnosticState,
    cfg: &SumConfig,
    x_new: &PointVec,
    x_old: &PointVec,
    g_old: &PointVec,
    gamma_old: f64,
) -> Result<DiagnosticState> {
    let p = if cfg.beta == 0.0 {
        PointVec::zeros(x_new.dim())?
    } else {
        let drift = crate::vec::vec_axpy(cfg.s * gamma_old, g_old, &x_new.sub(x_old)?)?;
        drift.scale(cfg.beta / (1.0 - cfg.beta))?
    };
    let v_vec = if cfg.beta > 0.0 {
        Some(p.scale((1.0 - cfg.beta) / cfg.beta)?)
    } else {
        None
    };
    let z = x_new.add(&p)?;
    Ok(DiagnosticState {
        p,
        v_vec,
        z,
        sum_gamma_grad2: prev.sum_gamma_grad2,
        sum_p2: prev.sum_p2,
        sum_gamma_p2alpha: prev.sum_gamma_p2alpha,
    })
}

/// Residual between the directly computed v_{t+1} and its one-step recursion
/// v_{t+1} = beta v_t + ((1-beta)s - 1) gamma_t g_t, normalized by
/// 1 + ||v_{t+1}||. None when beta = 0 (v is undefined there).
pub fn v_recursion_residual(
    prev: &DiagnosticState,
    next: &DiagnosticState,
    cfg: &SumConfig,
    g_old: &PointVec,
    gamma_old: f64,
) -> Result<Option<f64>> {
    let (Some(v_prev), Some(v_next)) = (&prev.v_vec, &next.v_vec) else {
        return Ok(None);
    };
    let coeff = ((1.0 - cfg.beta) * cfg.s - 1.0) * gamma_old;
    let v_rec = crate::vec::vec_axpy(coeff, g_old, &v_prev.scale(cfg.beta)?)?;
    let resid = v_next.sub(&v_rec)?.norm() / (1.0 + v_next.norm());
    Ok(Some(resid))
}

/// One-step residual of the z recursion, normalized by 1 + ||z_t||.
pub fn z_step_residual(
    z_prev: &PointVec,
    z_next: &PointVec,
    g: &PointVec,
    gamma_alg: f64,
    beta: f64,
) -> Result<f64> {
    let predicted = crate::vec::vec_axpy(-gamma_alg / (1.0 - beta), g, z_prev)?;
    Ok(z_next.sub(&predicted)?.norm() / (1.0 + z_prev.norm()))
}

/// Max normalized residual of the z recursion over a recorded trace of
/// (z_t, gamma_t, g_t). `zs` has one more entry than the step arrays.
pub fn check_z_recursion(
    zs: &[PointVec],
    gammas: &[f64],
    gs: &[PointVec],
    beta: f64,
) -> Result<f64> {
    if zs.len() != gammas.len() + 1 || gammas.len() != gs.len() {
        return Err(Error::Degenerate(format!(
            "need len(zs) = len(gammas)+1 = len(gs)+1, got {}, {}, {}",
            zs.len(),
            gammas.len(),
            gs.len()
        )));
    }
    if zs.len() < 2 {
        return Err(Error::Degenerate("trace too short for a recursion check".into()));
    }
    let mut worst = 0.0f64;
    for t in 0..gammas.len() {
        let r = z_step_residual(&zs[t], &zs[t + 1], &gs[t], gammas[t], beta)?;
        if r > worst {
            worst = r;
        }
    }
    Ok(worst)
}

/// One row of the per-iteration trace. Field order matches the CSV columns.
#[derive(Debug, Clone, Copy)]
pub struct TraceRecord {
    pub t: u64,
    pub gamma: f64,
    pub f_x: f64,
    pub grad_norm: f64,
    pub p_norm: f64,
    pub f_z: f64,
    pub delta_norm: f64,
    pub sum_gamma_grad2: f64,
}

/// Value gap |f(x_t) - f(z_t)| and its momentum bound
/// ||grad f(x_t)|| ||p_t|| + A_eff ||p_t||^{1+alpha} / (1+alpha).
pub fn fx_fz_gap(record: &TraceRecord, a_eff: f64, alpha: f64) -> (f64, f64) {
    let gap = (record.f_x - record.f_z).abs();
    let bound =
        record.grad_norm * record.p_norm + a_eff * record.p_norm.powf(1.0 + alpha) / (1.0 + alpha);
    (gap, bound)
}

/// Streaming detector of upcrossing intervals of a scalar series from a to b:
/// a start value strictly below a, an end strictly above b, and everything
/// between inside [a, b]. Intervals are maximal and scanned left to right.
#[derive(Debug, Clone)]
pub struct UpcrossingScanner {
    a: f64,
    b: f64,
    index: usize,
    start: Option<usize>,
    intervals: Vec<(usize, usize)>,
}

impl UpcrossingScanner {
    pub fn new(a: f64, b: f64) -> Result<UpcrossingScanner> {
        if !(a > 0.0 && a < b) {
            return Err(Error::invalid("a", format!("need 0 < a < b, got a={a}, b={b}")));
        }
        Ok(UpcrossingScanner {
            a,
            b,
            index: 0,
            start: None,
            intervals: Vec::new(),
        })
    }

    pub fn feed(&mut self, value: f64) {
        let i = self.index;
        self.index += 1;
        match self.start {
            None => {
                if value < self.a {
                    self.start = Some(i);
                }
            }
            Some(start) => {
                if value > self.b {
                    self.intervals.push((start, i));
                    self.start = None;
                } else if value < self.a {
                    // A fresh sub-a point restarts the candidate interval:
                    // the old start would leave this point in the interior.
                    self.start = Some(i);
                }
            }
        }
    }

    pub fn count(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.intervals
    }
}

/// Counts upcrossing intervals of a recorded series. Returns the count and
/// the (start, end) index pairs.
pub fn count_upcrossings(values: &[f64], a: f64, b: f64) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut scanner = UpcrossingScanner::new(a, b)?;
    for &v in values {
        scanner.feed(v);
    }
    let intervals = scanner.intervals;
    Ok((intervals.len(), intervals))
}

/// Least-squares slope of log(mean) against log(T) over per-horizon
/// summaries (T, mean).
pub fn rate_regression(summaries: &[(f64, f64)]) -> Result<f64> {
    let mut log_t = Vec::with_capacity(summaries.len());
    let mut log_mean = Vec::with_capacity(summaries.len());
    for &(t, mean) in summaries {
        if mean <= 0.0 || !mean.is_finite() {
            return Err(Error::invalid(
                "mean",
                format!("rate regression needs positive means, got {mean} at T={t}"),
            ));
        }
        log_t.push(t.ln());
        log_mean.push(mean.ln());
    }
    stats::ls_slope(&log_t, &log_mean)
}

/// Ratio of the max of a series over its last tenth to the max over its
/// first tenth. Zero-over-zero counts as zero; positive-over-zero is +inf.
pub fn tail_head_ratio(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len();
    let head_len = (n.div_ceil(10)).max(1);
    let tail_start = (n * 9) / 10;
    let head = values[..head_len].iter().cloned().fold(0.0f64, f64::max);
    let tail = values[tail_start..].iter().cloned().fold(0.0f64, f64::max);
    if head == 0.0 {
        if tail == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        tail / head
    }
}

/// Relative growth of a nondecreasing partial-sum series over its second
/// half: (last - mid) / mid.
pub fn last_half_growth(partial_sums: &[f64]) -> Result<f64> {
    if partial_sums.len() < 2 {
        return Err(Error::Degenerate("need at least 2 partial sums".into()));
    }
    let mid = partial_sums[partial_sums.len() / 2 - 1];
    let last = *partial_sums.last().expect("nonempty");
    if mid <= 0.0 {
        return Err(Error::Degenerate(format!(
            "mid-run partial sum must be positive, got {mid}"
        )));
    }
    Ok((last - mid) / mid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> PointVec {
        PointVec::new(v.to_vec()).unwrap()
    }

    #[test]
    fn p_is_zero_without_momentum() {
        let cfg = SumConfig::new(0.0, 0.0).unwrap();
        let prev = DiagnosticState::start(&pv(&[1.0]), 0.0).unwrap();
        let next = update_p(&prev, &cfg, &pv(&[0.8]), &pv(&[1.0]), &pv(&[2.0]), 0.1).unwrap();
        assert_eq!(next.p.norm(), 0.0);
        assert!(next.v_vec.is_none());
        assert_eq!(next.z.as_slice(), &[0.8]);
    }

    #[test]
    fn p_hand_value_after_first_heavy_ball_step() {
        // beta = 0.5, s = 0: first step x 1 -> 0.8 with gamma 0.1, g 2:
        // p_1 = (0.5/0.5) (0.8 - 1 + 0) = -0.2.
        let cfg = SumConfig::new(0.5, 0.0).unwrap();
        let prev = DiagnosticState::start(&pv(&[1.0]), 0.5).unwrap();
        let next = update_p(&prev, &cfg, &pv(&[0.8]), &pv(&[1.0]), &pv(&[2.0]), 0.1).unwrap();
        assert!((next.p[0] + 0.2).abs() < 1e-15);
        assert!((next.z[0] - 0.6).abs() < 1e-15);
        // v_1 = ((1-beta)/beta) p_1 = -0.2
        assert!((next.v_vec.as_ref().unwrap()[0] + 0.2).abs() < 1e-15);
    }

    #[test]
    fn v_recursion_matches_direct_over_random_steps() {
        use crate::optim::{sum_step, SumState};
        use crate::oracles::OracleSample;
        use crate::rng::split_stream;

        let mut rng = split_stream(15, 0);
        for &(beta, s) in &[(0.5, 0.0), (0.9, 1.0), (0.3, 2.5)] {
            let cfg = SumConfig::new(beta, s).unwrap();
            let x0 = pv(&[0.4, -0.2, 1.1]);
            let mut state = SumState::new(x0.clone());
            let mut diag = DiagnosticState::start(&x0, beta).unwrap();
            for t in 0..1000u64 {
                let g = PointVec::new(rng.fill_gaussian(3)).unwrap();
                let gamma = 0.05 + 0.05 * rng.next_f64();
                let sample = OracleSample { g: g.clone(), t };
                let next_state = sum_step(&state, &cfg, &sample, gamma).unwrap();
                let next_diag =
                    update_p(&diag, &cfg, &next_state.x, &state.x, &g, gamma).unwrap();
                let resid = v_recursion_residual(&diag, &next_diag, &cfg, &g, gamma)
                    .unwrap()
                    .expect("beta > 0");
                assert!(resid <= 1e-12, "beta={beta} s={s} t={t}: residual {resid}");
                state = next_state;
                diag = next_diag;
            }
        }
    }

    #[test]
    fn z_recursion_exact_for_sgd() {
        // beta = 0: z == x and the recursion is the plain descent step.
        let zs = vec![pv(&[1.0]), pv(&[0.8]), pv(&[0.9])];
        let gammas = [0.1, 0.1];
        let gs = [pv(&[2.0]), pv(&[-1.0])];
        let resid = check_z_recursion(&zs, &gammas, &gs, 0.0).unwrap();
        assert_eq!(resid, 0.0);
    }

    #[test]
    fn corrupted_z_trace_is_flagged() {
        let mut zs = vec![pv(&[1.0]), pv(&[0.8]), pv(&[0.9])];
        let gammas = [0.1, 0.1];
        let gs = [pv(&[2.0]), pv(&[-1.0])];
        zs[1] = pv(&[0.801]); // 1e-3 corruption
        let resid = check_z_recursion(&zs, &gammas, &gs, 0.0).unwrap();
        assert!(resid >= 1e-4, "residual {resid}");
    }

    #[test]
    fn fx_fz_gap_quadratic_equality_case() {
        // f = x^2/2 at x = 1 with p = 0.1: gap = 0.105 equals the bound.
        let rec = TraceRecord {
            t: 0,
            gamma: 0.1,
            f_x: 0.5,
            grad_norm: 1.0,
            p_norm: 0.1,
            f_z: 0.605,
            delta_norm: 0.0,
            sum_gamma_grad2: 0.0,
        };
        let (gap, bound) = fx_fz_gap(&rec, 1.0, 1.0);
        assert!((gap - 0.105).abs() < 1e-15);
        assert!((bound - 0.105).abs() < 1e-15);
        assert!(gap <= bound + GAP_SLACK);
    }

    #[test]
    fn fx_fz_gap_zero_momentum() {
        let rec = TraceRecord {
            t: 0,
            gamma: 0.1,
            f_x: 1.0,
            grad_norm: 2.0,
            p_norm: 0.0,
            f_z: 1.0,
            delta_norm: 0.0,
            sum_gamma_grad2: 0.0,
        };
        let (gap, bound) = fx_fz_gap(&rec, 5.0, 0.5);
        assert_eq!((gap, bound), (0.0, 0.0));
    }

    #[test]
    fn upcrossing_single_interval() {
        let (count, intervals) = count_upcrossings(&[0.1, 0.3, 0.6], 0.25, 0.5).unwrap();
        assert_eq!(count, 1);
        assert_eq!(intervals, vec![(0, 2)]);
    }

    #[test]
    fn upcrossing_monotone_decreasing_has_none() {
        let (count, _) = count_upcrossings(&[0.9, 0.7, 0.4, 0.2, 0.1], 0.25, 0.5).unwrap();
        assert_eq!(count, 0);
    }

    #[test]
    fn upcrossing_two_adjacent_intervals() {
        let (count, intervals) = count_upcrossings(&[0.1, 0.6, 0.1, 0.6], 0.25, 0.5).unwrap();
        assert_eq!(count, 2);
        assert_eq!(intervals, vec![(0, 1), (2, 3)]);
    }

    #[test]
    fn upcrossing_restart_on_new_low() {
        // The dip at index 1 invalidates a start at 0; the valid interval is {1, 2, 3}.
        let (count, intervals) = count_upcrossings(&[0.1, 0.05, 0.3, 0.6], 0.25, 0.5).unwrap();
        assert_eq!(count, 1);
        assert_eq!(intervals, vec![(1, 3)]);
    }

    #[test]
    fn upcrossing_rejects_bad_band() {
        assert!(count_upcrossings(&[0.1], 0.5, 0.5).is_err());
        assert!(count_upcrossings(&[0.1], 0.6, 0.5).is_err());
    }

    #[test]
    fn rate_regression_recovers_exact_power_law() {
        let data: Vec<(f64, f64)> = [100.0, 1_000.0, 10_000.0, 100_000.0]
            .iter()
            .map(|&t: &f64| (t, 3.0 * t.powf(-0.5)))
            .collect();
        let slope = rate_regression(&data).unwrap();
        assert!((slope + 0.5).abs() < 1e-9, "slope {slope}");
    }

    #[test]
    fn rate_regression_rejects_nonpositive_means() {
        assert!(rate_regression(&[(100.0, 1.0), (1000.0, 0.0)]).is_err());
    }

    #[test]
    fn tail_head_ratio_decaying_series() {
        let vals: Vec<f64> = (0..100).map(|t| 1.0 / (t as f64 + 1.0)).collect();
        let ratio = tail_head_ratio(&vals);
        assert!(ratio < 0.05, "ratio {ratio}");
        assert_eq!(tail_head_ratio(&vec![0.0; 50]), 0.0);
    }

    #[test]
    fn last_half_growth_of_plateaued_sums() {
        // Partial sums of 1/t^2: essentially flat in the second half.
        let mut sums = Vec::new();
        let mut acc = 0.0;
        for t in 1..=1000 {
            acc += 1.0 / (t as f64 * t as f64);
            sums.push(acc);
        }
        let growth = last_half_growth(&sums).unwrap();
        assert!(growth < 0.01, "growth {growth}");
    }
}
