//! Exact objective functions with known smoothness class.
//!
//! Each objective exposes its value, gradient, and a `SmoothnessInfo`
//! describing the Hölder class of the gradient: the exponent `alpha` in
//! (0, 1] and, when known in closed form, the constant A such that
//! ||grad f(x) - grad f(y)|| <= A ||x - y||^alpha. Objectives whose constant
//! is not known analytically get it from [`estimate_holder`].

mod svm;

pub use svm::{smooth_hinge, svm_objective, SvmDataset, SvmObjective};

use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::vec::PointVec;

/// Hölder class of an objective's gradient.
#[derive(Debug, Clone, Copy)]
pub struct SmoothnessInfo {
    /// Hölder exponent of the gradient, in (0, 1]. 1 means L-smooth.
    pub alpha: f64,
    /// Hölder constant when known in closed form.
    pub holder_a: Option<f64>,
    /// Lower bound on inf f when known.
    pub f_star_lower: Option<f64>,
}

impl SmoothnessInfo {
    pub fn new(alpha: f64, holder_a: Option<f64>, f_star_lower: Option<f64>) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid("alpha", format!("must be in (0, 1], got {alpha}")));
        }
        if let Some(a) = holder_a {
            if a <= 0.0 {
                return Err(Error::invalid("holder_a", format!("must be positive, got {a}")));
            }
        }
        Ok(SmoothnessInfo {
            alpha,
            holder_a,
            f_star_lower,
        })
    }
}

/// A differentiable objective with a known smoothness class.
///
/// Implementations are immutable after construction; evaluation is reentrant.
pub trait Objective: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &PointVec) -> Result<f64>;
    fn grad(&self, x: &PointVec) -> Result<PointVec>;
    fn smoothness(&self) -> SmoothnessInfo;
}

pub(crate) fn check_dim(expected: usize, x: &PointVec) -> Result<()> {
    if x.dim() != expected {
        return Err(Error::DimensionMismatch {
            left: expected,
            right: x.dim(),
        });
    }
    Ok(())
}

fn finite_value(v: f64, what: &str) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::non_finite(format!("{what} output"), None));
    }
    Ok(v)
}

/// f(x) = (curvature/2) ||x||^2: the canonical L-smooth test case (alpha = 1).
#[derive(Debug, Clone)]
pub struct Quadratic {
    dim: usize,
    curvature: f64,
}

pub fn quadratic(dim: usize, curvature: f64) -> Result<Quadratic> {
    if dim == 0 {
        return Err(Error::invalid("dim", "must be at least 1"));
    }
    if curvature <= 0.0 {
        return Err(Error::invalid(
            "curvature",
            format!("must be positive, got {curvature}"),
        ));
    }
    Ok(Quadratic { dim, curvature })
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &PointVec) -> Result<f64> {
        check_dim(self.dim, x)?;
        finite_value(0.5 * self.curvature * x.norm_sq(), "quadratic value")
    }

    fn grad(&self, x: &PointVec) -> Result<PointVec> {
        check_dim(self.dim, x)?;
        x.scale(self.curvature)
    }

    fn smoothness(&self) -> SmoothnessInfo {
        SmoothnessInfo {
            alpha: 1.0,
            holder_a: Some(self.curvature),
            f_star_lower: Some(0.0),
        }
    }
}

/// The scalar C^{4/3} function: f(x) = |x|^{4/3} for |x| <= 1 and
/// 2|x|^{2/3} - 1 beyond. Its derivative is 1/3-Hölder but not Lipschitz.
///
/// The even extension to negative x (via |x| powers) keeps the function in
/// C^{4/3} with its minimum at the origin.
#[derive(Debug, Clone)]
pub struct HolderScalar;

pub fn holder_scalar() -> HolderScalar {
    HolderScalar
}

impl Objective for HolderScalar {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &PointVec) -> Result<f64> {
        check_dim(1, x)?;
        let a = x[0].abs();
        let v = if a <= 1.0 {
            a.powf(4.0 / 3.0)
        } else {
            2.0 * a.powf(2.0 / 3.0) - 1.0
        };
        finite_value(v, "holder_scalar value")
    }

    fn grad(&self, x: &PointVec) -> Result<PointVec> {
        check_dim(1, x)?;
        let v = x[0];
        let g = if v == 0.0 {
            0.0
        } else {
            let a = v.abs();
            let mag = if a <= 1.0 {
                (4.0 / 3.0) * a.cbrt()
            } else {
                (4.0 / 3.0) / a.cbrt()
            };
            mag * v.signum()
        };
        PointVec::new(vec![g])
    }

    fn smoothness(&self) -> SmoothnessInfo {
        SmoothnessInfo {
            alpha: 1.0 / 3.0,
            holder_a: None,
            f_star_lower: Some(0.0),
        }
    }
}

/// Result of the empirical Hölder-class fit.
#[derive(Debug, Clone, Copy)]
pub struct HolderEstimate {
    pub alpha_hat: f64,
    pub a_hat: f64,
}

/// Estimates (alpha, A) of an objective's gradient on a ball of the given
/// radius around the origin.
///
/// For each of a log-spaced ladder of separations delta, the estimator takes
/// the max of ||grad f(x) - grad f(y)|| over sampled pairs with
/// ||x - y|| = delta (random midpoints plus pairs anchored at the region
/// center, where cusp-type seams of the bundled objectives sit), then fits
/// log(max) against log(delta). The slope is alpha_hat, clamped to (0, 1];
/// a_hat is taken from the largest residual so that
/// a_hat * delta^alpha_hat dominates every observation.
pub fn estimate_holder(
    obj: &dyn Objective,
    region_radius: f64,
    n_pairs: usize,
    rng: &mut RngStream,
) -> Result<HolderEstimate> {
    if region_radius < 0.0 || !region_radius.is_finite() {
        return Err(Error::invalid(
            "region_radius",
            format!("must be nonnegative and finite, got {region_radius}"),
        ));
    }
    if n_pairs < 100 {
        return Err(Error::invalid(
            "n_pairs",
            format!("need at least 100 pairs, got {n_pairs}"),
        ));
    }

    let dim = obj.dim();
    const N_SCALES: usize = 12;
    let per_scale = n_pairs / N_SCALES;
    let delta_max = 0.5 * region_radius;
    let delta_min = 1e-3 * region_radius;

    let mut log_delta = Vec::with_capacity(N_SCALES);
    let mut log_max_diff = Vec::with_capacity(N_SCALES);
    let mut kept_pairs = 0usize;

    for j in 0..N_SCALES {
        let frac = j as f64 / (N_SCALES - 1) as f64;
        let delta = delta_min * (delta_max / delta_min).powf(frac);
        let mut max_diff = 0.0f64;

        for k in 0..per_scale + 4 {
            // The first 4 pairs per scale are anchored at the region center.
            let midpoint = if k < 4 {
                PointVec::zeros(dim)?
            } else {
                let coords: Vec<f64> = (0..dim)
                    .map(|_| (2.0 * rng.next_f64() - 1.0) * 0.75 * region_radius)
                    .collect();
                PointVec::new(coords)?
            };
            let dir = random_unit(dim, rng);
            let offset = dir.scale(0.5 * delta)?;
            let x = midpoint.sub(&offset)?;
            let y = midpoint.add(&offset)?;
            if x.sub(&y)?.norm() == 0.0 {
                continue;
            }
            kept_pairs += 1;
            let diff = obj.grad(&x)?.sub(&obj.grad(&y)?)?.norm();
            if diff > max_diff {
                max_diff = diff;
            }
        }

        if max_diff > 0.0 {
            log_delta.push(delta.ln());
            log_max_diff.push(max_diff.ln());
        }
    }

    if kept_pairs == 0 {
        return Err(Error::Degenerate(
            "all sampled pairs had zero separation".into(),
        ));
    }
    if log_delta.len() < 2 {
        return Err(Error::Degenerate(
            "gradient differences vanish on the sampled region".into(),
        ));
    }

    let slope = ls_slope(&log_delta, &log_max_diff)?;
    let alpha_hat = slope.clamp(1e-3, 1.0);
    let a_hat = log_delta
        .iter()
        .zip(&log_max_diff)
        .map(|(u, w)| (w - alpha_hat * u).exp())
        .fold(0.0f64, f64::max);

    Ok(HolderEstimate { alpha_hat, a_hat })
}

fn random_unit(dim: usize, rng: &mut RngStream) -> PointVec {
    loop {
        let g = rng.fill_gaussian(dim);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return PointVec::new(g.iter().map(|v| v / norm).collect()).expect("finite unit vector");
        }
    }
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("regression abscissae are identical".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}
