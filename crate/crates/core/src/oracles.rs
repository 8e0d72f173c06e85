//! Stochastic first-order oracles.
//!
//! An oracle returns a randomized gradient estimate g(x, xi). The bundled
//! families are unbiased by construction (additive Gaussian noise, optional
//! gradient-proportional noise, minibatch subsampling); the clipping wrapper
//! caps the sample norm and is therefore biased, which it reports so that
//! statistical certification can refuse to run on it.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::objectives::{Objective, SvmDataset, SvmObjective};
use crate::rng::RngStream;
use crate::vec::{vec_axpy, PointVec};

/// One stochastic gradient draw.
#[derive(Debug, Clone)]
pub struct OracleSample {
    pub g: PointVec,
    pub t: u64,
}

/// Additive and gradient-proportional noise scales.
///
/// The implied second moment is
/// E||g - grad f||^2 = sigma^2 * d + relative_c * ||grad f||^2,
/// matching the usual (sigma^2, C) bound with sigma_eff^2 = sigma^2 * d.
#[derive(Debug, Clone, Copy)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub relative_c: f64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, relative_c: f64) -> Result<Self> {
        if sigma < 0.0 || !sigma.is_finite() {
            return Err(Error::invalid("sigma", format!("must be nonnegative, got {sigma}")));
        }
        if relative_c < 0.0 || !relative_c.is_finite() {
            return Err(Error::invalid(
                "relative_c",
                format!("must be nonnegative, got {relative_c}"),
            ));
        }
        Ok(NoiseSpec { sigma, relative_c })
    }

    pub const NOISELESS: NoiseSpec = NoiseSpec {
        sigma: 0.0,
        relative_c: 0.0,
    };

    /// The additive part of the second-moment bound for dimension d.
    pub fn sigma_sq_eff(&self, dim: usize) -> f64 {
        self.sigma * self.sigma * dim as f64
    }

    /// The gradient-proportional coefficient of the second-moment bound.
    pub fn c_eff(&self) -> f64 {
        self.relative_c
    }
}

/// A stochastic first-order oracle.
pub trait Oracle: Send + Sync {
    fn dim(&self) -> usize;

    /// Draws one stochastic gradient at x. Randomness comes entirely from
    /// the caller-owned stream; t is recorded in the sample for tracing.
    fn sample(&self, x: &PointVec, t: u64, rng: &mut RngStream) -> Result<OracleSample>;

    /// Almost-sure bound on ||g||, when one holds by construction.
    fn bound(&self) -> Option<f64> {
        None
    }

    /// True when the oracle's mean deviates from the exact gradient.
    fn is_biased(&self) -> bool {
        false
    }
}

/// Exact gradient plus sigma * z + sqrt(relative_c) * ||grad f|| * u, where z
/// is standard normal and u is an independent isotropic draw with
/// E||u||^2 = 1. The mean is exactly grad f(x).
pub struct GaussianOracle {
    obj: Arc<dyn Objective>,
    spec: NoiseSpec,
}

pub fn gaussian_oracle(obj: Arc<dyn Objective>, spec: NoiseSpec) -> GaussianOracle {
    GaussianOracle { obj, spec }
}

impl Oracle for GaussianOracle {
    fn dim(&self) -> usize {
        self.obj.dim()
    }

    fn sample(&self, x: &PointVec, t: u64, rng: &mut RngStream) -> Result<OracleSample> {
        let grad = self.obj.grad(x)?;
        let mut g = grad.clone();
        if self.spec.sigma > 0.0 {
            let z = PointVec::new(rng.fill_gaussian(g.dim()))?;
            g = vec_axpy(self.spec.sigma, &z, &g)?;
        }
        if self.spec.relative_c > 0.0 {
            let d = g.dim() as f64;
            // u = z'/sqrt(d) has E||u||^2 = 1, independent of z.
            let u = PointVec::new(rng.fill_gaussian(g.dim()))?;
            let scale = self.spec.relative_c.sqrt() * grad.norm() / d.sqrt();
            g = vec_axpy(scale, &u, &g)?;
        }
        Ok(OracleSample { g, t })
    }
}

/// Uniform-with-replacement minibatch gradient of the smooth-hinge risk.
/// Unbiased for the full gradient by linearity; with batch == n the sampling
/// degenerates to one exact full pass.
pub struct MinibatchOracle {
    obj: SvmObjective,
    batch: usize,
}

pub fn minibatch_oracle(data: SvmDataset, alpha: f64, batch: usize) -> Result<MinibatchOracle> {
    let n = data.n();
    if batch == 0 || batch > n {
        return Err(Error::invalid(
            "batch",
            format!("must be in 1..={n}, got {batch}"),
        ));
    }
    Ok(MinibatchOracle {
        obj: crate::objectives::svm_objective(data, alpha)?,
        batch,
    })
}

impl MinibatchOracle {
    pub fn objective(&self) -> &SvmObjective {
        &self.obj
    }

    /// Exact per-draw second moment E||g - grad f||^2 at x, by enumerating
    /// all n single-sample gradients. Serves as the independent reference
    /// for second-moment certification.
    pub fn exact_second_moment(&self, x: &PointVec) -> Result<f64> {
        let n = self.obj.data().n();
        let full = self.obj.grad(x)?;
        let mut mean_norm_sq = 0.0;
        for i in 0..n {
            mean_norm_sq += self.obj.sample_grad(x, i)?.norm_sq();
        }
        mean_norm_sq /= n as f64;
        // Var of the mean of `batch` iid draws.
        Ok((mean_norm_sq - full.norm_sq()) / self.batch as f64)
    }
}

impl Oracle for MinibatchOracle {
    fn dim(&self) -> usize {
        self.obj.dim()
    }

    fn sample(&self, x: &PointVec, t: u64, rng: &mut RngStream) -> Result<OracleSample> {
        let n = self.obj.data().n();
        if self.batch == n {
            return Ok(OracleSample {
                g: self.obj.grad(x)?,
                t,
            });
        }
        let mut acc = PointVec::zeros(self.obj.dim())?;
        for _ in 0..self.batch {
            let i = rng.next_index(n);
            acc = acc.add(&self.obj.sample_grad(x, i)?)?;
        }
        Ok(OracleSample {
            g: acc.scale(1.0 / self.batch as f64)?,
            t,
        })
    }
}

/// Rescales any inner sample with ||g|| > g_max back to norm g_max.
///
/// This realizes the bounded-oracle regime but introduces bias, so the
/// wrapper reports `is_biased` and certification routines reject it.
pub struct ClippedOracle {
    inner: Box<dyn Oracle>,
    g_max: f64,
}

pub fn clipped_oracle(inner: Box<dyn Oracle>, g_max: f64) -> Result<ClippedOracle> {
    if g_max <= 0.0 || !g_max.is_finite() {
        return Err(Error::invalid("g_max", format!("must be positive, got {g_max}")));
    }
    Ok(ClippedOracle { inner, g_max })
}

impl Oracle for ClippedOracle {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn sample(&self, x: &PointVec, t: u64, rng: &mut RngStream) -> Result<OracleSample> {
        let mut s = self.inner.sample(x, t, rng)?;
        let norm = s.g.norm();
        if norm > self.g_max {
            s.g = s.g.scale(self.g_max / norm)?;
        }
        Ok(s)
    }

    fn bound(&self) -> Option<f64> {
        Some(self.g_max)
    }

    fn is_biased(&self) -> bool {
        true
    }
}

/// Outcome of an unbiasedness certification.
#[derive(Debug, Clone, Copy)]
pub struct UnbiasednessReport {
    /// ||empirical mean - grad f(x)||.
    pub deviation: f64,
    /// stat_confidence * sigma_hat * sqrt(d / n).
    pub threshold: f64,
    pub pass: bool,
}

/// Certifies E[g] = grad f(x) at a point by comparing the empirical mean of
/// n draws against a CLT bound with estimated per-coordinate sigma.
pub fn verify_unbiasedness(
    oracle: &dyn Oracle,
    obj: &dyn Objective,
    x: &PointVec,
    n: usize,
    stat_confidence: f64,
    rng: &mut RngStream,
) -> Result<UnbiasednessReport> {
    if oracle.is_biased() {
        return Err(Error::BiasedOracle(
            "clipping distorts the mean; exclude this oracle from (A.3) checks".into(),
        ));
    }
    if n < 1_000 {
        return Err(Error::invalid("n", format!("need at least 1000 draws, got {n}")));
    }
    let grad = obj.grad(x)?;
    let d = grad.dim() as f64;
    let mut sum = PointVec::zeros(grad.dim())?;
    let mut sum_dev_sq = 0.0;
    for t in 0..n {
        let s = oracle.sample(x, t as u64, rng)?;
        sum_dev_sq += s.g.sub(&grad)?.norm_sq();
        sum = sum.add(&s.g)?;
    }
    let mean = sum.scale(1.0 / n as f64)?;
    let deviation = mean.sub(&grad)?.norm();
    let sigma_hat = (sum_dev_sq / n as f64 / d).sqrt();
    let threshold = stat_confidence * sigma_hat * (d / n as f64).sqrt();
    Ok(UnbiasednessReport {
        deviation,
        threshold,
        pass: deviation <= threshold,
    })
}

/// Outcome of a second-moment certification at one point.
#[derive(Debug, Clone, Copy)]
pub struct SecondMomentReport {
    /// Empirical mean of ||g - grad f||^2.
    pub empirical: f64,
    /// The asserted bound sigma_sq_eff + c_eff * ||grad f||^2.
    pub bound: f64,
    /// empirical <= slack * bound.
    pub pass: bool,
}

/// Checks the noise second moment against a known (sigma_sq_eff, c_eff)
/// bound with multiplicative slack.
pub fn verify_second_moment(
    oracle: &dyn Oracle,
    obj: &dyn Objective,
    x: &PointVec,
    n: usize,
    sigma_sq_eff: f64,
    c_eff: f64,
    slack: f64,
    rng: &mut RngStream,
) -> Result<SecondMomentReport> {
    let grad = obj.grad(x)?;
    let mut sum = 0.0;
    for t in 0..n {
        let s = oracle.sample(x, t as u64, rng)?;
        sum += s.g.sub(&grad)?.norm_sq();
    }
    let empirical = sum / n as f64;
    let bound = sigma_sq_eff + c_eff * grad.norm_sq();
    Ok(SecondMomentReport {
        empirical,
        bound,
        pass: empirical <= slack * bound,
    })
}
