//! Momentum steppers.
//!
//! `sum_step` advances the two-sequence unified momentum update whose
//! parameter s selects the classical specializations: s = 1/(1-beta) is SGD
//! with stepsize gamma/(1-beta), s = 0 is heavy ball, s = 1 is Nesterov.
//! `adam_step` advances the perturbed Adam variant whose stepsize at t is
//! (1-beta) / ((t+1)^{1/2+eps} (kappa + sqrt(v_t))) with v_t driven by the
//! previous gradient norm, so the stepsize is measurable before the current
//! gradient is drawn.

mod reference;
mod run;

pub use reference::{reference_sgd, reference_shb, reference_snag};
pub use run::{run, OptimizerSpec, RunFailure, RunOptions, Trace};

use crate::error::{Error, Result};
use crate::oracles::OracleSample;
use crate::vec::PointVec;

/// Momentum factor and reduction parameter of the unified update.
#[derive(Debug, Clone, Copy)]
pub struct SumConfig {
    pub beta: f64,
    pub s: f64,
}

impl SumConfig {
    pub fn new(beta: f64, s: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::invalid("beta", format!("must be in [0, 1), got {beta}")));
        }
        if s < 0.0 || !s.is_finite() {
            return Err(Error::invalid("s", format!("must be nonnegative, got {s}")));
        }
        Ok(SumConfig { beta, s })
    }

    /// The s value that collapses the update to plain SGD.
    pub fn sgd_equivalent_s(beta: f64) -> f64 {
        1.0 / (1.0 - beta)
    }
}

/// Evolving state of the unified momentum recursion: the iterate and the
/// auxiliary y^s sequence. The transient y_{t+1} is recomputed per step.
#[derive(Debug, Clone)]
pub struct SumState {
    pub t: u64,
    pub x: PointVec,
    pub ys_prev: PointVec,
}

impl SumState {
    /// Initial state at x0, with y^s_0 = x0.
    pub fn new(x0: PointVec) -> SumState {
        SumState {
            t: 0,
            ys_prev: x0.clone(),
            x: x0,
        }
    }
}

/// One unified-momentum step:
/// y_{t+1} = x_t - gamma g_t, y^s_{t+1} = x_t - s gamma g_t,
/// x_{t+1} = y_{t+1} + beta (y^s_{t+1} - y^s_t).
pub fn sum_step(
    state: &SumState,
    cfg: &SumConfig,
    g: &OracleSample,
    gamma: f64,
) -> Result<SumState> {
    if gamma < 0.0 || !gamma.is_finite() {
        return Err(Error::invalid("gamma", format!("must be nonnegative, got {gamma}")));
    }
    let d = state.x.dim();
    if g.g.dim() != d || state.ys_prev.dim() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: g.g.dim(),
        });
    }

    let mut x_next = Vec::with_capacity(d);
    let mut ys_next = Vec::with_capacity(d);
    for i in 0..d {
        let xi = state.x[i];
        let gi = g.g[i];
        let y = xi - gamma * gi;
        let ys = xi - cfg.s * gamma * gi;
        ys_next.push(ys);
        x_next.push(y + cfg.beta * (ys - state.ys_prev[i]));
    }

    let diverged = |what: &str| Error::Divergence {
        iteration: state.t,
        detail: format!("{what} became non-finite"),
    };
    let x = PointVec::new(x_next).map_err(|_| diverged("iterate"))?;
    let ys_prev = PointVec::new(ys_next).map_err(|_| diverged("momentum sequence"))?;
    Ok(SumState {
        t: state.t + 1,
        x,
        ys_prev,
    })
}

/// Parameters of the perturbed Adam update.
#[derive(Debug, Clone, Copy)]
pub struct AdamParams {
    pub beta: f64,
    pub beta_prime: f64,
    pub kappa: f64,
    /// Exponent offset in the (t+1)^{1/2+eps} decay, in (0, 1/2].
    pub eps: f64,
}

impl AdamParams {
    pub fn new(beta: f64, beta_prime: f64, kappa: f64, eps: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::invalid("beta", format!("must be in [0, 1), got {beta}")));
        }
        if !(0.0..1.0).contains(&beta_prime) {
            return Err(Error::invalid(
                "beta_prime",
                format!("must be in [0, 1), got {beta_prime}"),
            ));
        }
        if kappa <= 0.0 || !kappa.is_finite() {
            return Err(Error::invalid("kappa", format!("must be positive, got {kappa}")));
        }
        if !(eps > 0.0 && eps <= 0.5) {
            return Err(Error::invalid("eps", format!("must be in (0, 1/2], got {eps}")));
        }
        Ok(AdamParams {
            beta,
            beta_prime,
            kappa,
            eps,
        })
    }
}

/// Evolving Adam state: iterate, momentum buffer, and the scalar second
/// moment of past gradient norms.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub t: u64,
    pub x: PointVec,
    pub m: PointVec,
    pub second_moment: f64,
    pub params: AdamParams,
}

impl AdamState {
    /// Initial state: m_0 = 0, v_0 = 0.
    pub fn new(x0: PointVec, params: AdamParams) -> Result<AdamState> {
        let m = PointVec::zeros(x0.dim())?;
        Ok(AdamState {
            t: 0,
            x: x0,
            m,
            second_moment: 0.0,
            params,
        })
    }
}

/// One perturbed-Adam step. `g_prev_norm_sq` is ||g_{t-1}||^2, zero at t = 0;
/// threading it explicitly keeps the stepsize's independence from the current
/// draw visible in the call structure.
///
/// Returns the advanced state and the effective stepsize in unified-momentum
/// framing, i.e. the update coefficient divided by (1-beta).
pub fn adam_step(
    state: &AdamState,
    g: &OracleSample,
    g_prev_norm_sq: f64,
) -> Result<(AdamState, f64)> {
    if g_prev_norm_sq < 0.0 || !g_prev_norm_sq.is_finite() {
        return Err(Error::invalid(
            "g_prev_norm_sq",
            format!("must be nonnegative, got {g_prev_norm_sq}"),
        ));
    }
    let d = state.x.dim();
    if g.g.dim() != d {
        return Err(Error::DimensionMismatch {
            left: d,
            right: g.g.dim(),
        });
    }
    let p = state.params;

    let v = p.beta_prime * state.second_moment + (1.0 - p.beta_prime) * g_prev_norm_sq;
    let decay = ((state.t + 1) as f64).powf(0.5 + p.eps);
    let coeff = (1.0 - p.beta) / (decay * (p.kappa + v.sqrt()));
    let gamma_used = coeff / (1.0 - p.beta);

    let mut m_next = Vec::with_capacity(d);
    let mut x_next = Vec::with_capacity(d);
    for i in 0..d {
        let m = p.beta * state.m[i] - coeff * g.g[i];
        m_next.push(m);
        x_next.push(state.x[i] + m);
    }

    let diverged = |what: &str| Error::Divergence {
        iteration: state.t,
        detail: format!("{what} became non-finite"),
    };
    let x = PointVec::new(x_next).map_err(|_| diverged("iterate"))?;
    let m = PointVec::new(m_next).map_err(|_| diverged("momentum buffer"))?;
    Ok((
        AdamState {
            t: state.t + 1,
            x,
            m,
            second_moment: v,
            params: p,
        },
        gamma_used,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(g: &[f64]) -> OracleSample {
        OracleSample {
            g: PointVec::new(g.to_vec()).unwrap(),
            t: 0,
        }
    }

    #[test]
    fn momentum_off_is_plain_gradient_step() {
        let cfg = SumConfig::new(0.0, 3.7).unwrap(); // s irrelevant at beta = 0
        let state = SumState::new(PointVec::new(vec![1.0]).unwrap());
        let next = sum_step(&state, &cfg, &sample(&[2.0]), 0.1).unwrap();
        assert!((next.x[0] - 0.8).abs() < 1e-15);
        assert_eq!(next.t, 1);
    }

    #[test]
    fn hand_traced_step_matches_sgd_reduction() {
        // beta = 0.5, s = 1/(1-beta) = 2: x' must equal x - gamma/(1-beta) g.
        let cfg = SumConfig::new(0.5, 2.0).unwrap();
        let state = SumState::new(PointVec::new(vec![1.0]).unwrap());
        let next = sum_step(&state, &cfg, &sample(&[2.0]), 0.1).unwrap();
        // y' = 0.8, ys' = 0.6, x' = 0.8 + 0.5 (0.6 - 1.0) = 0.6
        assert!((next.x[0] - 0.6).abs() < 1e-15);
        assert!((next.ys_prev[0] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn ten_heavy_ball_steps_match_reference() {
        let cfg = SumConfig::new(0.9, 0.0).unwrap();
        let x0 = PointVec::new(vec![0.3, -0.4]).unwrap();
        let gs: Vec<PointVec> = (0..10)
            .map(|t| PointVec::new(vec![(t as f64 * 0.7).sin(), (t as f64 * 0.3).cos()]).unwrap())
            .collect();
        let gammas = vec![0.1; 10];

        let mut state = SumState::new(x0.clone());
        let mut iterates = vec![x0.clone()];
        for t in 0..10 {
            state = sum_step(
                &state,
                &cfg,
                &OracleSample {
                    g: gs[t].clone(),
                    t: t as u64,
                },
                gammas[t],
            )
            .unwrap();
            iterates.push(state.x.clone());
        }

        let reference = reference_shb(&x0, &gammas, &gs, 0.9).unwrap();
        for (a, b) in iterates.iter().zip(&reference) {
            let diff = a.sub(b).unwrap().norm();
            assert!(diff <= 1e-12, "diff {diff}");
        }
    }

    #[test]
    fn sum_step_rejects_negative_gamma_and_bad_dims() {
        let cfg = SumConfig::new(0.5, 1.0).unwrap();
        let state = SumState::new(PointVec::new(vec![1.0]).unwrap());
        assert!(sum_step(&state, &cfg, &sample(&[1.0]), -0.1).is_err());
        assert!(sum_step(&state, &cfg, &sample(&[1.0, 2.0]), 0.1).is_err());
    }

    #[test]
    fn sum_step_overflow_reports_iteration() {
        let cfg = SumConfig::new(0.0, 0.0).unwrap();
        let mut state = SumState::new(PointVec::new(vec![1.0]).unwrap());
        state.t = 41;
        let err = sum_step(&state, &cfg, &sample(&[f64::MAX]), 2.0).unwrap_err();
        match err {
            Error::Divergence { iteration, .. } => assert_eq!(iteration, 41),
            other => panic!("expected divergence, got {other}"),
        }
    }

    #[test]
    fn adam_first_step_coefficient() {
        // At t = 0 with v_0 = 0 the coefficient is (1-beta)/kappa.
        let params = AdamParams::new(0.9, 0.999, 2.0, 0.25).unwrap();
        let state = AdamState::new(PointVec::new(vec![1.0]).unwrap(), params).unwrap();
        let (next, gamma_used) = adam_step(&state, &sample(&[1.0]), 0.0).unwrap();
        let coeff = (1.0 - 0.9) / 2.0;
        assert!((next.x[0] - (1.0 - coeff)).abs() < 1e-15);
        assert!((gamma_used - coeff / (1.0 - 0.9)).abs() < 1e-15);
        assert_eq!(next.second_moment, 0.0);
    }

    #[test]
    fn adam_second_step_formula() {
        // beta = 0, beta' = 0, kappa = 1, eps = 1/2, ||g_0||^2 = 3 at t = 1:
        // v_1 = 3 and x_2 = x_1 - g_1 / (2 (1 + sqrt(3))).
        let params = AdamParams::new(0.0, 0.0, 1.0, 0.5).unwrap();
        let mut state = AdamState::new(PointVec::new(vec![0.5]).unwrap(), params).unwrap();
        state.t = 1;
        let (next, gamma_used) = adam_step(&state, &sample(&[1.0]), 3.0).unwrap();
        let expected_coeff = 1.0 / (2.0 * (1.0 + 3.0f64.sqrt()));
        assert!((next.x[0] - (0.5 - expected_coeff)).abs() < 1e-15);
        assert!((next.second_moment - 3.0).abs() < 1e-15);
        assert!((gamma_used - expected_coeff).abs() < 1e-15);
    }

    #[test]
    fn adam_stepsize_sandwich_under_bounded_gradients() {
        let g_bound: f64 = 5.0;
        let params = AdamParams::new(0.9, 0.99, 0.5, 0.25).unwrap();
        let mut state = AdamState::new(PointVec::new(vec![1.0, 1.0]).unwrap(), params).unwrap();
        let mut prev_norm_sq = 0.0;
        for t in 0..200u64 {
            let raw = [(t as f64).sin() * 7.0, (t as f64).cos() * 7.0];
            let norm = (raw[0] * raw[0] + raw[1] * raw[1]).sqrt();
            let scale = if norm > g_bound { g_bound / norm } else { 1.0 };
            let g = sample(&[raw[0] * scale, raw[1] * scale]);
            let (next, gamma_used) = adam_step(&state, &g, prev_norm_sq).unwrap();
            let decay = ((t + 1) as f64).powf(0.75);
            let lo = 1.0 / (decay * (params.kappa + g_bound));
            let hi = 1.0 / (decay * params.kappa);
            assert!(
                gamma_used >= lo * (1.0 - 1e-12) && gamma_used <= hi * (1.0 + 1e-12),
                "t={t}: {gamma_used} outside [{lo}, {hi}]"
            );
            prev_norm_sq = g.g.norm_sq();
            state = next;
        }
    }

    #[test]
    fn adam_params_validation() {
        assert!(AdamParams::new(1.0, 0.9, 1.0, 0.25).is_err());
        assert!(AdamParams::new(0.9, 1.0, 1.0, 0.25).is_err());
        assert!(AdamParams::new(0.9, 0.9, 0.0, 0.25).is_err());
        assert!(AdamParams::new(0.9, 0.9, 1.0, 0.0).is_err());
        assert!(AdamParams::new(0.9, 0.9, 1.0, 0.6).is_err());
    }
}
