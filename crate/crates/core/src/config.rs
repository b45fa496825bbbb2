//! Experiment configuration files (`[section]` tables of `key = value`).
//!
//! ```toml
//! [domain]
//! dim = 1
//! extents = [[0.0, 1.0]]
//! n_cells = [128]
//!
//! [coeff]
//! kind = "constant"
//! value = 1.0
//!
//! [data]
//! kind = "constant"
//! value = 1.0
//! lambda_scale = 10.0
//!
//! [series]
//! kind = "log"
//! ```

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::analysis::Tolerances;
use crate::elliptic::{
    build_grid, CoefficientField, DataFamily, DomainSpec, EllipticProblem, GridFunction,
};
use crate::error::{Error, Result};
use crate::series::{CoefficientSequence, SequenceKind, TailRule, DEFAULT_M_MAX};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub dim: usize,
    pub extents: Vec<[f64; 2]>,
    pub n_cells: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "kebab-case")]
pub enum CoeffSection {
    /// `a_i(x) = value` on every axis.
    Constant { value: f64 },
    /// `a_i(x) = base[i] + slope[i] * x_i`.
    LinearRamp {
        base: Vec<f64>,
        slope: Vec<f64>,
        alpha: f64,
        beta: f64,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub enum DataKind {
    Constant,
    Bump,
    File,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub kind: DataKind,
    pub value: Option<f64>,
    pub center: Option<Vec<f64>>,
    pub width: Option<f64>,
    pub amplitude: Option<f64>,
    /// GridFunction CSV, relative to the config file.
    pub path: Option<PathBuf>,
    #[serde(default = "one")]
    pub lambda_scale: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub enum SeriesKind {
    Harmonic,
    Log,
    Geometric,
    PowerLaw,
    Custom,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub enum TailKind {
    Zero,
    RepeatLastRatio,
    PowerLaw,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSection {
    pub kind: SeriesKind,
    pub ratio: Option<f64>,
    pub exponent: Option<f64>,
    pub values: Option<Vec<f64>>,
    pub tail: Option<TailKind>,
    pub tail_exponent: Option<f64>,
    pub m_max: Option<usize>,
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub tol_linear: Option<f64>,
    pub tol_eig: Option<f64>,
    pub tol_series: Option<f64>,
    pub cg_max_iter: Option<usize>,
    pub eig_max_iter: Option<usize>,
    pub jacobi: Option<bool>,
    pub band: Option<f64>,
    pub coarse_check: Option<bool>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_schedule")]
    pub n_schedule: Vec<usize>,
    #[serde(default = "default_stop_tol")]
    pub stop_tol: f64,
    /// Level `M` for tail-measure checks; defaults to `1.2 sigma`.
    pub tail_level: Option<f64>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            n_schedule: default_schedule(),
            stop_tol: default_stop_tol(),
            tail_level: None,
        }
    }
}

fn default_schedule() -> Vec<usize> {
    vec![1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1024]
}

fn default_stop_tol() -> f64 {
    1e-10
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    domain: DomainSection,
    coeff: CoeffSection,
    data: DataSection,
    series: SeriesSection,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    run: RunSection,
}

/// A parsed and validated experiment.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub domain: DomainSection,
    pub coeff: CoeffSection,
    pub data: DataSection,
    pub series: SeriesSection,
    pub solver: SolverSection,
    pub run: RunSection,
    /// Hex SHA-256 of the file contents.
    pub hash: String,
    /// Directory used to resolve relative paths.
    pub base_dir: PathBuf,
}

fn bad(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("{key}: {msg}"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &base_dir)
    }

    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let cfg = Self {
            domain: raw.domain,
            coeff: raw.coeff,
            data: raw.data,
            series: raw.series,
            solver: raw.solver,
            run: raw.run,
            hash: hex(&Sha256::digest(text.as_bytes())),
            base_dir: base_dir.to_path_buf(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Short hash used in output provenance lines.
    pub fn short_hash(&self) -> &str {
        &self.hash[..16]
    }

    fn validate(&self) -> Result<()> {
        let d = &self.domain;
        if d.dim != 1 && d.dim != 2 {
            return Err(bad("domain.dim", format!("must be 1 or 2, got {}", d.dim)));
        }
        if d.extents.len() != d.dim {
            return Err(bad("domain.extents", format!("needs {} intervals", d.dim)));
        }
        if d.n_cells.len() != d.dim {
            return Err(bad("domain.n_cells", format!("needs {} entries", d.dim)));
        }
        if !(self.data.lambda_scale > 0.0 && self.data.lambda_scale.is_finite()) {
            return Err(bad("data.lambda_scale", "must be positive"));
        }
        if let Some(p) = &self.data.path {
            let full = self.base_dir.join(p);
            if !full.is_file() {
                return Err(bad(
                    "data.path",
                    format!("file {} does not exist", full.display()),
                ));
            }
        }
        if self.series.tol.is_some() && self.solver.tol_series.is_some() {
            return Err(bad(
                "series.tol",
                "give either series.tol or solver.tol_series, not both",
            ));
        }
        if !(self.run.stop_tol >= 0.0) {
            return Err(bad("run.stop_tol", "must be nonnegative"));
        }
        if self.run.n_schedule.is_empty()
            || self.run.n_schedule[0] == 0
            || self.run.n_schedule.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(bad(
                "run.n_schedule",
                "must be a nonempty increasing list of positive integers",
            ));
        }
        if let Some(m) = self.run.tail_level {
            if !(m > 0.0) {
                return Err(bad("run.tail_level", "must be positive"));
            }
        }
        self.tolerances().validate()
    }

    pub fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        let s = &self.solver;
        Tolerances {
            tol_linear: s.tol_linear.unwrap_or(d.tol_linear),
            tol_eig: s.tol_eig.unwrap_or(d.tol_eig),
            tol_series: s.tol_series.or(self.series.tol).unwrap_or(d.tol_series),
            m_max: self.series.m_max.unwrap_or(DEFAULT_M_MAX),
            band: s.band.unwrap_or(d.band),
            jacobi: s.jacobi.unwrap_or(d.jacobi),
            cg_max_iter: s.cg_max_iter.or(d.cg_max_iter),
            eig_max_iter: s.eig_max_iter.unwrap_or(d.eig_max_iter),
            coarse_check: s.coarse_check.unwrap_or(d.coarse_check),
        }
    }

    pub fn sequence(&self) -> Result<CoefficientSequence> {
        let s = &self.series;
        let need =
            |v: Option<f64>, key: &str| v.ok_or_else(|| bad(key, "required for this series kind"));
        let kind = match s.kind {
            SeriesKind::Harmonic => SequenceKind::Harmonic,
            SeriesKind::Log => SequenceKind::LogKind,
            SeriesKind::Geometric => SequenceKind::Geometric {
                ratio: need(s.ratio, "series.ratio")?,
            },
            SeriesKind::PowerLaw => SequenceKind::PowerLaw {
                exponent: need(s.exponent, "series.exponent")?,
            },
            SeriesKind::Custom => {
                let values = s
                    .values
                    .clone()
                    .ok_or_else(|| bad("series.values", "required for custom"))?;
                let tail = match s
                    .tail
                    .ok_or_else(|| bad("series.tail", "required for custom"))?
                {
                    TailKind::Zero => TailRule::Zero,
                    TailKind::RepeatLastRatio => TailRule::RepeatLastRatio,
                    TailKind::PowerLaw => TailRule::PowerLaw {
                        exponent: need(s.tail_exponent, "series.tail_exponent")?,
                    },
                };
                SequenceKind::Custom { values, tail }
            }
        };
        CoefficientSequence::new(kind)
    }

    pub fn problem(&self) -> Result<EllipticProblem> {
        self.problem_with_lambda(self.data.lambda_scale)
    }

    pub fn problem_with_lambda(&self, lambda: f64) -> Result<EllipticProblem> {
        let d = &self.domain;
        let spec = DomainSpec {
            extents: d.extents.iter().map(|e| (e[0], e[1])).collect(),
            n_cells: d.n_cells.clone(),
        };
        let grid = build_grid(&spec)?;
        let field = match &self.coeff {
            CoeffSection::Constant { value } => {
                if !(*value > 0.0 && value.is_finite()) {
                    return Err(bad("coeff.value", "must be positive"));
                }
                CoefficientField::constant(&grid, *value)?
            }
            CoeffSection::LinearRamp {
                base,
                slope,
                alpha,
                beta,
            } => {
                if base.len() != d.dim || slope.len() != d.dim {
                    return Err(bad(
                        "coeff.base",
                        format!("base and slope need {} entries", d.dim),
                    ));
                }
                CoefficientField::from_fn(&grid, *alpha, *beta, |axis, x| {
                    base[axis] + slope[axis] * x[axis]
                })?
            }
        };
        let data = &self.data;
        let f = match data.kind {
            DataKind::Constant => {
                DataFamily::Constant(data.value.ok_or_else(|| bad("data.value", "required"))?)
                    .evaluate(&grid)?
            }
            DataKind::Bump => DataFamily::Bump {
                center: data
                    .center
                    .clone()
                    .ok_or_else(|| bad("data.center", "required"))?,
                width: data.width.ok_or_else(|| bad("data.width", "required"))?,
                amplitude: data
                    .amplitude
                    .ok_or_else(|| bad("data.amplitude", "required"))?,
            }
            .evaluate(&grid)?,
            DataKind::File => {
                let rel = data
                    .path
                    .as_ref()
                    .ok_or_else(|| bad("data.path", "required"))?;
                let path = self.base_dir.join(rel);
                let file = fs::File::open(&path).map_err(|source| Error::Io {
                    path: path.display().to_string(),
                    source,
                })?;
                GridFunction::read_csv(&grid, BufReader::new(file))?
            }
        };
        EllipticProblem::new(grid, field, f, lambda)
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
