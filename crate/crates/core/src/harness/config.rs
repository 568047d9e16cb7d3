use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::background::{cutoff_time, BackgroundSpec, Interval, PhysicalConstants, Profile};
use crate::coherent::{GkSpec, Target};
use crate::ep::{self, EpKind, EpSolution};
use crate::error::{Error, Result};
use crate::ode::OdeOptions;

pub const SCHEMA_VERSION: u32 = 1;

/// σ(0) = μ = √(5/3) and σ̇(0) = −γμ/2 with γ = 2: the exponential
/// family's own initial data, used when a numeric run names no ICs.
pub fn default_ics() -> (f64, f64) {
    let mu = (5.0f64 / 3.0).sqrt();
    (mu, -mu)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub constants: PhysicalConstants,
    pub background: BackgroundConfig,
    #[serde(default)]
    pub ep: EpConfig,
    pub t_grid: TimeGrid,
    #[serde(default)]
    pub analysis: Vec<AnalysisItem>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BackgroundConfig {
    ThetaOmega {
        theta: Profile,
        omega_field: Profile,
    },
    DirectAb {
        a: Profile,
        b: Profile,
    },
    ChielliniExponential {
        alpha: f64,
        beta: f64,
        gamma: f64,
    },
    /// γ defaults to the value fixed by the family's constraint.
    ChielliniRational {
        n: u32,
        alpha: f64,
        beta: f64,
        gamma: Option<f64>,
        mu: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpMethod {
    #[default]
    Auto,
    Chiellini,
    Pinney,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EpConfig {
    pub method: EpMethod,
    pub ics: Option<(f64, f64)>,
    /// integrator tolerance
    pub tolerance: f64,
    /// bound on the EP residual checked after the run; per-kind default
    pub residual_tolerance: Option<f64>,
    /// Pinney constant c₁
    pub c1: f64,
}

impl Default for EpConfig {
    fn default() -> Self {
        EpConfig { method: EpMethod::Auto, ics: None, tolerance: 1e-12, residual_tolerance: None, c1: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points).map(|k| if k + 1 == self.points { self.stop } else { self.start + k as f64 * step }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalysisItem {
    Eigenstate {
        n: u32,
        m: u32,
    },
    Glauber {
        #[serde(default)]
        alpha: (f64, f64),
    },
    Squeezed {
        #[serde(default)]
        alpha: (f64, f64),
        beta: Option<f64>,
        optimize: Option<Target>,
    },
    Gk(GkSpec),
}

impl AnalysisItem {
    pub fn label(&self) -> String {
        match self {
            AnalysisItem::Eigenstate { n, m } => format!("eigenstate_n{n}_m{m}"),
            AnalysisItem::Glauber { .. } => "glauber".into(),
            AnalysisItem::Squeezed { optimize: Some(t), .. } => format!("squeezed_opt_{}", target_name(*t)),
            AnalysisItem::Squeezed { .. } => "squeezed".into(),
            AnalysisItem::Gk(g) => format!("gk_n{}", g.n),
        }
    }
}

pub fn target_name(t: Target) -> &'static str {
    match t {
        Target::XPx => "XPx",
        Target::XY => "XY",
        Target::PxPy => "PxPy",
        Target::Aux => "xpx",
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::config(toml_location(text, &e), e.message().to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::config("schema_version", format!("unsupported version {}, expected {SCHEMA_VERSION}", self.schema_version)));
        }
        self.constants.validate()?;
        let g = &self.t_grid;
        if g.points < 2 {
            return Err(Error::config("t_grid.points", "needs at least 2 points"));
        }
        if !(g.start >= 0.0 && g.start.is_finite()) {
            return Err(Error::config("t_grid.start", "must be a finite time >= 0"));
        }
        if !(g.stop > g.start && g.stop.is_finite()) {
            return Err(Error::config("t_grid.stop", "must be finite and greater than t_grid.start"));
        }
        if !(self.ep.tolerance > 0.0) {
            return Err(Error::config("ep.tolerance", "must be positive"));
        }
        if let Some((s0, _)) = self.ep.ics {
            if !(s0 > 0.0) {
                return Err(Error::config("ep.ics", "sigma0 must be positive"));
            }
        }
        for (k, item) in self.analysis.iter().enumerate() {
            match item {
                AnalysisItem::Gk(spec) => spec.validate().map_err(|e| prefix(e, &format!("analysis.{k}")))?,
                AnalysisItem::Squeezed { beta, optimize, .. } => {
                    if beta.is_some() == optimize.is_some() {
                        return Err(Error::config(format!("analysis.{k}"), "squeezed needs exactly one of `beta` or `optimize`"));
                    }
                    if beta.is_some_and(|b| !b.is_finite()) {
                        return Err(Error::config(format!("analysis.{k}.beta"), "must be finite"));
                    }
                }
                _ => {}
            }
        }
        let (bg, _) = self.background_spec()?;
        if let Some(tc) = cutoff_time(&bg) {
            if g.stop > tc {
                return Err(Error::config("t_grid.stop", format!("{} exceeds the cutoff time t_c = {tc}", g.stop)));
            }
        }
        if g.stop > bg.validity.end {
            return Err(Error::config("t_grid.stop", format!("{} is past the background validity end {}", g.stop, bg.validity.end)));
        }
        Ok(())
    }

    /// The background plus, for Chiellini families, its closed-form solution.
    pub fn background_spec(&self) -> Result<(BackgroundSpec, Option<EpSolution>)> {
        let c = self.constants;
        Ok(match self.background {
            BackgroundConfig::ThetaOmega { theta, omega_field } => (BackgroundSpec::theta_omega(theta, omega_field, c), None),
            BackgroundConfig::DirectAb { a, b } => (BackgroundSpec::direct_ab(a, b, c), None),
            BackgroundConfig::ChielliniExponential { alpha, beta, gamma } => {
                let (bg, sol) = ep::chiellini_exponential(alpha, beta, gamma, c).map_err(|e| prefix(e, "background"))?;
                (bg, Some(sol))
            }
            BackgroundConfig::ChielliniRational { n, alpha, beta, gamma, mu } => {
                let gamma = match gamma {
                    Some(g) => g,
                    None => ep::rational_gamma(n, alpha, beta, c.tau).map_err(|e| prefix(e, "background"))?,
                };
                let (bg, sol) = ep::chiellini_rational(n, alpha, beta, gamma, mu, c).map_err(|e| prefix(e, "background"))?;
                (bg, Some(sol))
            }
        })
    }

    /// Resolves the EP method and builds the solution over [0, stop].
    pub fn solve_ep(&self) -> Result<(BackgroundSpec, EpSolution)> {
        let (bg, closed) = self.background_spec()?;
        let stop = self.t_grid.stop;
        let method = match self.ep.method {
            EpMethod::Auto if closed.is_some() => EpMethod::Chiellini,
            EpMethod::Auto if bg.a_is_constant() => EpMethod::Pinney,
            EpMethod::Auto => EpMethod::Numeric,
            m => m,
        };
        let sol = match method {
            EpMethod::Chiellini => closed.clone().ok_or_else(|| Error::config("ep.method", "chiellini needs a chiellini_* background"))?,
            EpMethod::Pinney => {
                if !bg.a_is_constant() {
                    return Err(Error::config("ep.method", "pinney needs a constant a (constant theta)"));
                }
                let window = bg.with_validity(bg.validity.intersect(&Interval::new(0.0, stop)));
                ep::pinney_for_background(&window, self.ep.c1)?
            }
            EpMethod::Numeric | EpMethod::Auto => {
                let (s0, ds0) = match (self.ep.ics, &closed) {
                    (Some(ics), _) => ics,
                    (None, Some(sol)) => sol.state(0.0)?,
                    (None, None) => default_ics(),
                };
                let mut grid = vec![0.0];
                grid.extend(self.t_grid.times().into_iter().filter(|&t| t > 0.0));
                ep::integrate_ep(&bg, s0, ds0, &grid, OdeOptions::with_tolerance(self.ep.tolerance))?
            }
        };
        Ok((bg, sol))
    }

    pub fn residual_tolerance(&self, kind: EpKind) -> f64 {
        self.ep.residual_tolerance.unwrap_or_else(|| kind.residual_tolerance())
    }
}

fn prefix(e: Error, path: &str) -> Error {
    match e {
        Error::Config { path: p, msg } => Error::Config { path: format!("{path}.{p}"), msg },
        Error::Constraint(msg) => Error::Config { path: path.into(), msg },
        other => other,
    }
}

fn toml_location(text: &str, e: &toml::de::Error) -> String {
    match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            let snippet = text[span.clone()].trim();
            format!("line {line} `{snippet}`")
        }
        None => "<config>".into(),
    }
}
