//! Flat key-value experiment configs with [section] headers.
//!
//! The format is deliberately plain: full-line `#` comments, `[section]`
//! headers, `key = value` pairs. A commented example lives in the repo's
//! configs/ directory. Unknown sections or keys are errors so that typos
//! surface instead of silently using defaults.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::schedules::Schedule;

/// Which objective a run optimizes.
#[derive(Debug, Clone)]
pub enum ObjectiveSpec {
    Quadratic { dim: usize, curvature: f64 },
    HolderScalar,
    /// The dataset bundled with the crate.
    SvmFixture { alpha: f64 },
    SvmFile { path: String, alpha: f64 },
    SvmSynthetic {
        n: usize,
        dim: usize,
        separation: f64,
        noise_std: f64,
        alpha: f64,
        data_seed: u64,
    },
}

/// Noise model wrapped around the exact gradient.
#[derive(Debug, Clone)]
pub enum OracleKind {
    Exact,
    Gaussian { sigma: f64, relative_c: f64 },
    Minibatch { batch: usize },
}

#[derive(Debug, Clone)]
pub struct OracleCfg {
    pub kind: OracleKind,
    /// When set, samples are rescaled to at most this norm (biased).
    pub clip: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub enum OptimizerCfg {
    Sum { beta: f64, s: f64 },
    Adam { beta: f64 },
}

/// Starting point: either an explicit vector or a scale on the all-ones
/// direction.
#[derive(Debug, Clone)]
pub enum X0Spec {
    Scale(f64),
    Explicit(Vec<f64>),
}

/// Grid overrides for `sweep`; empty lists fall back to the base value.
#[derive(Debug, Clone, Default)]
pub struct SweepSpec {
    pub horizons: Vec<u64>,
    pub betas: Vec<f64>,
    pub s_values: Vec<f64>,
    pub schedules: Vec<Schedule>,
}

impl SweepSpec {
    pub fn is_empty(&self) -> bool {
        self.horizons.is_empty()
            && self.betas.is_empty()
            && self.s_values.is_empty()
            && self.schedules.is_empty()
    }
}

/// A fully parsed experiment configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub objective: ObjectiveSpec,
    pub oracle: OracleCfg,
    pub optimizer: OptimizerCfg,
    pub schedule: Schedule,
    pub iterations: u64,
    pub base_seed: u64,
    pub n_runs: u64,
    pub diagnostics_full: bool,
    pub out_dir: PathBuf,
    pub upcross_epsilon: f64,
    pub x0: X0Spec,
    pub require_a6: bool,
    pub sweep: Option<SweepSpec>,
}

struct Section {
    name: String,
    entries: BTreeMap<String, String>,
    seen: std::cell::RefCell<Vec<String>>,
}

impl Section {
    fn get(&self, key: &str) -> Option<&str> {
        self.seen.borrow_mut().push(key.to_string());
        self.entries.get(key).map(|s| s.as_str())
    }

    fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| {
            Error::Config(format!("[{}] is missing required key `{key}`", self.name))
        })
    }

    fn parse<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::Config(format!("[{}] key `{key}`: cannot parse `{raw}`", self.name))
            }),
        }
    }

    fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn parse_required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        let raw = self.require(key)?;
        raw.parse::<T>().map_err(|_| {
            Error::Config(format!("[{}] key `{key}`: cannot parse `{raw}`", self.name))
        })
    }

    fn reject_unknown(&self) -> Result<()> {
        let seen = self.seen.borrow();
        for key in self.entries.keys() {
            if !seen.iter().any(|s| s == key) {
                return Err(Error::Config(format!(
                    "[{}] has unknown key `{key}`",
                    self.name
                )));
            }
        }
        Ok(())
    }
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section>> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            let name = name.trim().to_string();
            if sections.contains_key(&name) {
                return Err(Error::Config(format!(
                    "line {}: duplicate section [{name}]",
                    lineno + 1
                )));
            }
            sections.insert(
                name.clone(),
                Section {
                    name: name.clone(),
                    entries: BTreeMap::new(),
                    seen: std::cell::RefCell::new(Vec::new()),
                },
            );
            current = Some(name);
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1))
        })?;
        let section = current
            .as_ref()
            .ok_or_else(|| Error::Config(format!("line {}: key before any [section]", lineno + 1)))?;
        let entries = &mut sections.get_mut(section).expect("section exists").entries;
        let key = key.trim().to_string();
        if entries.contains_key(&key) {
            return Err(Error::Config(format!(
                "line {}: duplicate key `{key}` in [{section}]",
                lineno + 1
            )));
        }
        entries.insert(key, value.trim().to_string());
    }
    Ok(sections)
}

fn parse_list<T: std::str::FromStr>(raw: &str, what: &str) -> Result<Vec<T>> {
    raw.split(',')
        .map(|tok| tok.trim())
        .filter(|tok| !tok.is_empty())
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| Error::Config(format!("bad {what} entry `{tok}`")))
        })
        .collect()
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig> {
        let sections = split_sections(text)?;
        let known = ["objective", "oracle", "optimizer", "schedule", "run", "sweep"];
        for name in sections.keys() {
            if !known.contains(&name.as_str()) {
                return Err(Error::Config(format!("unknown section [{name}]")));
            }
        }
        let section = |name: &str| -> Result<&Section> {
            sections
                .get(name)
                .ok_or_else(|| Error::Config(format!("missing section [{name}]")))
        };

        let obj_sec = section("objective")?;
        let objective = match obj_sec.require("kind")? {
            "quadratic" => ObjectiveSpec::Quadratic {
                dim: obj_sec.parse_required("dim")?,
                curvature: obj_sec.parse_or("curvature", 1.0)?,
            },
            "holder_scalar" => ObjectiveSpec::HolderScalar,
            "svm_fixture" => ObjectiveSpec::SvmFixture {
                alpha: obj_sec.parse_or("alpha", 1.0)?,
            },
            "svm_file" => ObjectiveSpec::SvmFile {
                path: obj_sec.require("file")?.to_string(),
                alpha: obj_sec.parse_or("alpha", 1.0)?,
            },
            "svm_synthetic" => ObjectiveSpec::SvmSynthetic {
                n: obj_sec.parse_required("n")?,
                dim: obj_sec.parse_required("dim")?,
                separation: obj_sec.parse_or("separation", 3.0)?,
                noise_std: obj_sec.parse_or("noise_std", 0.5)?,
                alpha: obj_sec.parse_or("alpha", 1.0)?,
                data_seed: obj_sec.parse_or("data_seed", 1u64)?,
            },
            other => return Err(Error::Config(format!("unknown objective kind `{other}`"))),
        };
        obj_sec.reject_unknown()?;

        let ora_sec = section("oracle")?;
        let oracle_kind = match ora_sec.require("kind")? {
            "exact" => OracleKind::Exact,
            "gaussian" => OracleKind::Gaussian {
                sigma: ora_sec.parse_or("sigma", 0.0)?,
                relative_c: ora_sec.parse_or("relative_c", 0.0)?,
            },
            "minibatch" => OracleKind::Minibatch {
                batch: ora_sec.parse_required("batch")?,
            },
            other => return Err(Error::Config(format!("unknown oracle kind `{other}`"))),
        };
        let oracle = OracleCfg {
            kind: oracle_kind,
            clip: ora_sec.parse("clip")?,
        };
        ora_sec.reject_unknown()?;

        let opt_sec = section("optimizer")?;
        let optimizer = match opt_sec.require("kind")? {
            "sum" => OptimizerCfg::Sum {
                beta: opt_sec.parse_or("beta", 0.0)?,
                s: opt_sec.parse_or("s", 0.0)?,
            },
            "adam" => OptimizerCfg::Adam {
                beta: opt_sec.parse_or("beta", 0.9)?,
            },
            other => return Err(Error::Config(format!("unknown optimizer kind `{other}`"))),
        };
        opt_sec.reject_unknown()?;

        let sch_sec = section("schedule")?;
        let schedule = Schedule::parse(sch_sec.require("spec")?)?;
        sch_sec.reject_unknown()?;

        let run_sec = section("run")?;
        let iterations: u64 = run_sec.parse_required("T")?;
        if iterations == 0 {
            return Err(Error::Config("[run] T must be at least 1".into()));
        }
        let n_runs: u64 = run_sec.parse_or("n_runs", 1u64)?;
        if n_runs == 0 {
            return Err(Error::Config("[run] n_runs must be at least 1".into()));
        }
        let diagnostics_full = match run_sec.parse_or("diagnostics", "minimal".to_string())?.as_str()
        {
            "minimal" => false,
            "full" => true,
            other => {
                return Err(Error::Config(format!(
                    "[run] diagnostics must be minimal or full, got `{other}`"
                )))
            }
        };
        let x0 = match run_sec.get("x0") {
            Some(raw) => X0Spec::Explicit(parse_list(raw, "x0")?),
            None => X0Spec::Scale(run_sec.parse_or("x0_scale", 1.0)?),
        };
        let config = RunConfig {
            objective,
            oracle,
            optimizer,
            schedule,
            iterations,
            base_seed: run_sec.parse_or("base_seed", 0u64)?,
            n_runs,
            diagnostics_full,
            out_dir: PathBuf::from(run_sec.parse_or("out_dir", "out".to_string())?),
            upcross_epsilon: run_sec.parse_or("upcross_epsilon", 0.1)?,
            x0,
            require_a6: run_sec.parse_or("require_a6", false)?,
            sweep: None,
        };
        run_sec.reject_unknown()?;
        if config.upcross_epsilon <= 0.0 {
            return Err(Error::Config("[run] upcross_epsilon must be positive".into()));
        }

        let sweep = match sections.get("sweep") {
            None => None,
            Some(sec) => {
                let mut spec = SweepSpec::default();
                if let Some(raw) = sec.get("horizons") {
                    spec.horizons = parse_list(raw, "horizons")?;
                }
                if let Some(raw) = sec.get("betas") {
                    spec.betas = parse_list(raw, "betas")?;
                }
                if let Some(raw) = sec.get("s_values") {
                    spec.s_values = parse_list(raw, "s_values")?;
                }
                if let Some(raw) = sec.get("schedules") {
                    for part in raw.split(';').map(str::trim).filter(|p| !p.is_empty()) {
                        let sched = Schedule::parse(part)?;
                        if let Schedule::PowerDecay { r, .. } = sched {
                            // Grid values beyond 1.5 are all summable; keep sweeps meaningful.
                            if r > 1.5 {
                                return Err(Error::Config(format!(
                                    "sweep power_decay r={r} exceeds the 1.5 grid cap"
                                )));
                            }
                        }
                        spec.schedules.push(sched);
                    }
                }
                sec.reject_unknown()?;
                if spec.is_empty() {
                    return Err(Error::Config("[sweep] section defines an empty grid".into()));
                }
                Some(spec)
            }
        };

        Ok(RunConfig { sweep, ..config })
    }

    pub fn parse_file(path: &std::path::Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        RunConfig::parse(&text)
    }
}
