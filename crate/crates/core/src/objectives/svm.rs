//! Linear SVM with the smooth hinge loss.
//!
//! The loss h_a is continuously differentiable for every a > 0; for a < 1
//! the gradient of the empirical risk is a-Hölder rather than Lipschitz,
//! which makes this the bundled non-L-smooth multi-dimensional objective.

use crate::error::{Error, Result};
use crate::objectives::{check_dim, Objective, SmoothnessInfo};
use crate::rng::RngStream;
use crate::vec::PointVec;

/// Smooth hinge loss and its derivative at margin v.
///
/// Three branches: linear for v <= 0, a degree-(a+1) power bridge on (0, 1),
/// and zero for v >= 1. Value and derivative are continuous at both seams.
pub fn smooth_hinge(v: f64, alpha: f64) -> Result<(f64, f64)> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
    }
    let knee = alpha / (alpha + 1.0);
    let (value, deriv) = if v <= 0.0 {
        (knee - v, -1.0)
    } else if v < 1.0 {
        (v.powf(alpha + 1.0) / (alpha + 1.0) - v + knee, v.powf(alpha) - 1.0)
    } else {
        (0.0, 0.0)
    };
    Ok((value, deriv))
}

/// Labeled points for binary classification; labels are +1 or -1.
#[derive(Debug, Clone)]
pub struct SvmDataset {
    points: Vec<PointVec>,
    labels: Vec<f64>,
}

impl SvmDataset {
    pub fn new(points: Vec<PointVec>, labels: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Degenerate("dataset must contain at least one point".into()));
        }
        if points.len() != labels.len() {
            return Err(Error::DimensionMismatch {
                left: points.len(),
                right: labels.len(),
            });
        }
        let dim = points[0].dim();
        for (i, p) in points.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: p.dim(),
                });
            }
            if labels[i] != 1.0 && labels[i] != -1.0 {
                return Err(Error::invalid(
                    "labels",
                    format!("label {} at row {i} is not +1 or -1", labels[i]),
                ));
            }
        }
        Ok(SvmDataset { points, labels })
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn dim(&self) -> usize {
        self.points[0].dim()
    }

    pub fn point(&self, i: usize) -> &PointVec {
        &self.points[i]
    }

    pub fn label(&self, i: usize) -> f64 {
        self.labels[i]
    }

    /// Parses the plain-text fixture format: one sample per line,
    /// `label x1 x2 ... xd`, whitespace separated, label in {+1, -1}.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let label_tok = fields.next().ok_or_else(|| {
                Error::Config(format!("svm fixture line {}: empty sample", lineno + 1))
            })?;
            let label: f64 = match label_tok {
                "+1" | "1" => 1.0,
                "-1" => -1.0,
                other => {
                    return Err(Error::Config(format!(
                        "svm fixture line {}: label must be +1 or -1, got {other}",
                        lineno + 1
                    )))
                }
            };
            let coords: Vec<f64> = fields
                .map(|tok| {
                    tok.parse::<f64>().map_err(|_| {
                        Error::Config(format!(
                            "svm fixture line {}: bad coordinate {tok}",
                            lineno + 1
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            points.push(PointVec::new(coords)?);
            labels.push(label);
        }
        SvmDataset::new(points, labels)
    }

    /// Serializes in the same plain-text format `parse_text` reads.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n() {
            out.push_str(if self.labels[i] > 0.0 { "+1" } else { "-1" });
            for v in self.points[i].as_slice() {
                out.push(' ');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    /// The small dataset bundled with the crate (entries within [-3, 3]).
    pub fn bundled_small() -> SvmDataset {
        SvmDataset::parse_text(include_str!("../../fixtures/svm_small.txt"))
            .expect("bundled fixture parses")
    }

    /// Two spherical Gaussian clusters with opposite labels, centered at
    /// +/- separation/2 along the all-ones direction. Entries are clamped
    /// to [-3, 3] to keep the data desk-scale.
    pub fn synthetic_two_gaussians(
        n: usize,
        dim: usize,
        separation: f64,
        noise_std: f64,
        rng: &mut RngStream,
    ) -> Result<SvmDataset> {
        if n == 0 || dim == 0 {
            return Err(Error::invalid("n/dim", "need n >= 1 and dim >= 1"));
        }
        let center = separation / 2.0 / (dim as f64).sqrt();
        let mut points = Vec::with_capacity(n);
        let mut labels = Vec::with_capacity(n);
        for i in 0..n {
            let label = if i % 2 == 0 { 1.0 } else { -1.0 };
            let coords: Vec<f64> = (0..dim)
                .map(|_| (label * center + noise_std * rng.next_gaussian()).clamp(-3.0, 3.0))
                .collect();
            points.push(PointVec::new(coords)?);
            labels.push(label);
        }
        SvmDataset::new(points, labels)
    }
}

/// Empirical smooth-hinge risk over the stacked variable (w, b) in R^{d+1};
/// the bias b is the last coordinate.
#[derive(Debug, Clone)]
pub struct SvmObjective {
    data: SvmDataset,
    alpha: f64,
    /// (1/n) sum of ||(x_i, 1)||^2, cached for the Lipschitz constant.
    mean_aug_norm_sq: f64,
}

pub fn svm_objective(data: SvmDataset, alpha: f64) -> Result<SvmObjective> {
    if alpha <= 0.0 || !alpha.is_finite() {
        return Err(Error::invalid("alpha", format!("must be positive, got {alpha}")));
    }
    let mean_aug_norm_sq = (0..data.n())
        .map(|i| data.point(i).norm_sq() + 1.0)
        .sum::<f64>()
        / data.n() as f64;
    Ok(SvmObjective {
        data,
        alpha,
        mean_aug_norm_sq,
    })
}

impl SvmObjective {
    pub fn data(&self) -> &SvmDataset {
        &self.data
    }

    pub fn loss_alpha(&self) -> f64 {
        self.alpha
    }

    /// Margin y_i * (<w, x_i> + b) for sample i.
    pub fn margin(&self, wb: &PointVec, i: usize) -> Result<f64> {
        check_dim(self.data.dim() + 1, wb)?;
        let d = self.data.dim();
        let x = self.data.point(i);
        let mut dot = wb[d]; // bias
        for j in 0..d {
            dot += wb[j] * x[j];
        }
        Ok(self.data.label(i) * dot)
    }

    /// Gradient contribution of a single sample, used by minibatch oracles.
    pub fn sample_grad(&self, wb: &PointVec, i: usize) -> Result<PointVec> {
        let m = self.margin(wb, i)?;
        let (_, h_prime) = smooth_hinge(m, self.alpha)?;
        let scale = h_prime * self.data.label(i);
        let d = self.data.dim();
        let mut g = Vec::with_capacity(d + 1);
        let x = self.data.point(i);
        for j in 0..d {
            g.push(scale * x[j]);
        }
        g.push(scale);
        PointVec::new(g)
    }
}

impl Objective for SvmObjective {
    fn dim(&self) -> usize {
        self.data.dim() + 1
    }

    fn value(&self, wb: &PointVec) -> Result<f64> {
        check_dim(self.dim(), wb)?;
        let mut total = 0.0;
        for i in 0..self.data.n() {
            let m = self.margin(wb, i)?;
            total += smooth_hinge(m, self.alpha)?.0;
        }
        let v = total / self.data.n() as f64;
        if !v.is_finite() {
            return Err(Error::non_finite("svm objective value", None));
        }
        Ok(v)
    }

    fn grad(&self, wb: &PointVec) -> Result<PointVec> {
        check_dim(self.dim(), wb)?;
        let mut acc = PointVec::zeros(self.dim())?;
        for i in 0..self.data.n() {
            acc = acc.add(&self.sample_grad(wb, i)?)?;
        }
        acc.scale(1.0 / self.data.n() as f64)
    }

    fn smoothness(&self) -> SmoothnessInfo {
        // For loss exponent >= 1 the hinge derivative is alpha-Lipschitz on
        // (0, 1), giving the closed-form constant alpha * mean ||(x_i, 1)||^2.
        // Below 1 the gradient is only alpha-Hölder and the constant comes
        // from the runtime estimator.
        let holder_a = if self.alpha >= 1.0 {
            Some(self.alpha * self.mean_aug_norm_sq)
        } else {
            None
        };
        SmoothnessInfo {
            alpha: self.alpha.min(1.0),
            holder_a,
            f_star_lower: Some(0.0),
        }
    }
}
