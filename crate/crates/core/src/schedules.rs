//! Stepsize schedules and admissibility checks.
//!
//! A schedule is admissible when the stepsizes are nonnegative and
//! deterministic with a divergent sum and a convergent (1+alpha)-power sum.
//! Power-decay families are classified analytically; finite lists can only
//! be probed, so their verdict may be inconclusive.

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Parameters of the state-dependent Adam stepsize. The momentum factor
/// beta lives with the optimizer config; these are the schedule's own knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamScheduleParams {
    pub beta_prime: f64,
    pub kappa: f64,
    pub eps: f64,
}

/// A stepsize source.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// gamma_t = c / (t+1)^r.
    PowerDecay { c: f64, r: f64 },
    /// gamma_i = 1 / T^{1/(1+alpha)} for i < T; `horizon` None means
    /// "resolve from the run length".
    ConstantHorizon { horizon: Option<u64>, alpha: f64 },
    /// An explicit finite list of stepsizes.
    ExplicitList(Vec<f64>),
    /// Marker for the optimizer-side adaptive stepsize; has no closed-form
    /// gamma(t).
    AdaptiveAdam(AdamScheduleParams),
}

/// Verdict of the admissibility check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum A6Verdict {
    Valid,
    /// The (1+alpha)-power sum diverges.
    InvalidDivergentPower,
    /// The plain stepsize sum converges.
    InvalidSummable,
    Inconclusive,
}

impl std::fmt::Display for A6Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            A6Verdict::Valid => "valid",
            A6Verdict::InvalidDivergentPower => "invalid_divergent_power",
            A6Verdict::InvalidSummable => "invalid_summable",
            A6Verdict::Inconclusive => "inconclusive",
        };
        f.write_str(s)
    }
}

impl Schedule {
    pub fn power_decay(c: f64, r: f64) -> Result<Schedule> {
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::invalid("c", format!("must be positive, got {c}")));
        }
        if r <= 0.0 || !r.is_finite() {
            return Err(Error::invalid("r", format!("must be positive, got {r}")));
        }
        Ok(Schedule::PowerDecay { c, r })
    }

    pub fn constant_horizon(horizon: Option<u64>, alpha: f64) -> Result<Schedule> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid("alpha", format!("must be in (0, 1], got {alpha}")));
        }
        if horizon == Some(0) {
            return Err(Error::invalid("horizon", "must be at least 1"));
        }
        Ok(Schedule::ConstantHorizon { horizon, alpha })
    }

    pub fn explicit(gammas: Vec<f64>) -> Result<Schedule> {
        if gammas.is_empty() {
            return Err(Error::Degenerate("explicit schedule has no entries".into()));
        }
        if let Some(bad) = gammas.iter().find(|g| !g.is_finite() || **g < 0.0) {
            return Err(Error::invalid(
                "gammas",
                format!("entries must be nonnegative and finite, got {bad}"),
            ));
        }
        Ok(Schedule::ExplicitList(gammas))
    }

    /// True for schedules that are a pure function of t.
    pub fn is_deterministic(&self) -> bool {
        !matches!(self, Schedule::AdaptiveAdam(_))
    }

    /// Fills an unresolved constant-horizon length from the run length.
    pub fn resolved(self, run_len: u64) -> Schedule {
        match self {
            Schedule::ConstantHorizon { horizon: None, alpha } => Schedule::ConstantHorizon {
                horizon: Some(run_len),
                alpha,
            },
            other => other,
        }
    }

    /// Parses the textual schedule forms:
    /// `power_decay:c=0.5,r=1.0`, `constant_horizon:T=1000,alpha=1.0`
    /// (T=auto defers to the run length), `list:file=path`, and
    /// `adam:beta_prime=0.9,kappa=1e-8,eps=0.25`.
    pub fn parse(text: &str) -> Result<Schedule> {
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("schedule `{text}` is missing `kind:`")))?;
        let mut kv = std::collections::BTreeMap::new();
        for pair in rest.split(',') {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("schedule field `{pair}` is not key=value")))?;
            kv.insert(k.trim().to_string(), v.trim().to_string());
        }
        let num = |key: &str| -> Result<f64> {
            kv.get(key)
                .ok_or_else(|| Error::Config(format!("schedule `{kind}` is missing `{key}`")))?
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("schedule field `{key}` is not a number")))
        };
        match kind {
            "power_decay" => Schedule::power_decay(num("c")?, num("r")?),
            "constant_horizon" => {
                let t_raw = kv
                    .get("T")
                    .ok_or_else(|| Error::Config("constant_horizon is missing `T`".into()))?;
                let horizon = if t_raw == "auto" {
                    None
                } else {
                    Some(t_raw.parse::<u64>().map_err(|_| {
                        Error::Config("constant_horizon `T` must be an integer or `auto`".into())
                    })?)
                };
                Schedule::constant_horizon(horizon, num("alpha")?)
            }
            "list" => {
                let path = kv
                    .get("file")
                    .ok_or_else(|| Error::Config("list schedule is missing `file`".into()))?;
                let text =
                    std::fs::read_to_string(path).map_err(|e| Error::io(path.clone(), e))?;
                let gammas: Vec<f64> = text
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse::<f64>()
                            .map_err(|_| Error::Config(format!("bad stepsize `{tok}` in {path}")))
                    })
                    .collect::<Result<_>>()?;
                Schedule::explicit(gammas)
            }
            "adam" => Ok(Schedule::AdaptiveAdam(AdamScheduleParams {
                beta_prime: num("beta_prime")?,
                kappa: num("kappa")?,
                eps: num("eps")?,
            })),
            other => Err(Error::Config(format!("unknown schedule kind `{other}`"))),
        }
    }
}

/// The stepsize at iteration t; a pure function of (schedule, t).
pub fn gamma_at(sched: &Schedule, t: u64) -> Result<f64> {
    match sched {
        Schedule::PowerDecay { c, r } => Ok(c / ((t + 1) as f64).powf(*r)),
        Schedule::ConstantHorizon { horizon, alpha } => {
            let h = horizon.ok_or_else(|| {
                Error::Config("constant_horizon length is unresolved (T=auto)".into())
            })?;
            if t >= h {
                return Err(Error::ScheduleExhausted {
                    index: t,
                    len: h as usize,
                });
            }
            Ok((h as f64).powf(-1.0 / (1.0 + alpha)))
        }
        Schedule::ExplicitList(gammas) => {
            gammas
                .get(t as usize)
                .copied()
                .ok_or(Error::ScheduleExhausted {
                    index: t,
                    len: gammas.len(),
                })
        }
        Schedule::AdaptiveAdam(_) => Err(Error::AdaptiveSchedule),
    }
}

/// Classifies a schedule's admissibility for a given Hölder exponent.
///
/// Power-decay verdicts are analytic p-series facts; explicit lists are
/// probed numerically over `horizon` entries and may be inconclusive.
pub fn check_a6(sched: &Schedule, alpha: f64, horizon: u64) -> Result<A6Verdict> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::invalid("alpha", format!("must be in (0, 1], got {alpha}")));
    }
    Ok(match sched {
        Schedule::PowerDecay { r, .. } => {
            if *r > 1.0 {
                A6Verdict::InvalidSummable
            } else if r * (1.0 + alpha) <= 1.0 {
                A6Verdict::InvalidDivergentPower
            } else {
                A6Verdict::Valid
            }
        }
        // A finite-horizon constant stepsize is a budgeted device, not an
        // infinite sequence; admissibility does not apply to it.
        Schedule::ConstantHorizon { .. } => A6Verdict::Inconclusive,
        Schedule::ExplicitList(gammas) => {
            let n = gammas.len().min(horizon as usize);
            if n == 0 {
                return Ok(A6Verdict::Inconclusive);
            }
            let head: f64 = gammas[..n.div_ceil(2)].iter().sum();
            let tail: f64 = gammas[n.div_ceil(2)..n].iter().sum();
            if head + tail == 0.0 || (head > 0.0 && tail < 1e-3 * head) {
                // The running sum has visibly flattened out.
                A6Verdict::InvalidSummable
            } else {
                A6Verdict::Inconclusive
            }
        }
        Schedule::AdaptiveAdam(_) => A6Verdict::Inconclusive,
    })
}

/// Draws a termination index with P(i) = gamma_i / sum(gamma).
pub fn sample_rt(gammas: &[f64], rng: &mut RngStream) -> Result<usize> {
    if gammas.is_empty() {
        return Err(Error::Degenerate("no stepsizes to sample from".into()));
    }
    if let Some(bad) = gammas.iter().find(|g| !g.is_finite() || **g < 0.0) {
        return Err(Error::invalid(
            "gammas",
            format!("weights must be nonnegative and finite, got {bad}"),
        ));
    }
    let total: f64 = gammas.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("all stepsize weights are zero".into()));
    }
    let target = rng.next_f64() * total;
    let mut acc = 0.0;
    for (i, g) in gammas.iter().enumerate() {
        acc += g;
        if target < acc {
            return Ok(i);
        }
    }
    // Rounding pushed the target past the last bucket.
    Ok(gammas.len() - 1)
}
