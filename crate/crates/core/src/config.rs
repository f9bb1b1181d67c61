//! Run configuration, read from TOML with dotted sections:
//!
//! ```toml
//! n = 3
//! liouville = true
//!
//! [phi]
//! kind = "power_law"
//! p = 2
//!
//! [psi]
//! kind = "double_power"
//! m = "$m"
//! k = "$k"
//!
//! [scan]
//! x = { name = "m", min = -1, max = 5, steps = 61 }
//! y = { name = "k", min = -1, max = 5, steps = 61 }
//! overlay = "wang"
//! ```
//!
//! Any family parameter (and `n`) may be a number or `"$name"`, a reference
//! to a scan axis.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::families::{OddRational, PhiSpec, PowerSum, PowerTerm, PsiSpec};
use crate::radial::ModelSpace;
use crate::{Error, Result};

pub const DEFAULT_PRECISION: usize = 10;

#[derive(Debug)]
pub enum ConfigError {
    Read(PathBuf, std::io::Error),
    Parse(String),
    /// Well-formed but describes an invalid run.
    Invalid(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Read(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            ConfigError::Parse(m) => write!(f, "config parse error: {m}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// A number, or a `$name` reference to a scan axis.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Param {
    Value(f64),
    Var(String),
}

impl Param {
    fn resolve(&self, vars: &BTreeMap<String, f64>) -> std::result::Result<f64, ConfigError> {
        match self {
            Param::Value(v) => Ok(*v),
            Param::Var(s) => {
                let name = s
                    .strip_prefix('$')
                    .ok_or_else(|| ConfigError::Parse(format!("parameter {s:?} is neither a number nor a $variable")))?;
                vars.get(name)
                    .copied()
                    .ok_or_else(|| ConfigError::Invalid(format!("${name} is not a scan axis")))
            }
        }
    }

    fn var(&self) -> Option<&str> {
        match self {
            Param::Var(s) => s.strip_prefix('$'),
            Param::Value(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiConfig {
    ConstantOne,
    PowerLaw { p: Param },
    Pq { p: Param, q: Param },
    SumOfPowers { exponents: Vec<Param>, weights: Option<Vec<Param>> },
    Exponential,
    MeanCurvature,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PsiConfig {
    Zero,
    Power { a: Param, q: Param },
    DoublePower { m: Param, k: Param },
    /// Exponent `m = m_num/m_den`, both odd.
    LogPower { a: Param, q: Param, m_num: i64, #[serde(default = "one")] m_den: i64 },
    GeneralSum { a: Param, p: Param, b: Param, q: Param, c: Param, d: Param },
}

fn one() -> i64 {
    1
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub steps: u64,
}

impl Axis {
    /// `min + (max - min) i/(steps - 1)`; a single step gives `min`.
    pub fn value(&self, i: u64) -> f64 {
        if self.steps <= 1 {
            self.min
        } else {
            self.min + (self.max - self.min) * i as f64 / (self.steps - 1) as f64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overlay {
    /// `1 < m < (n+3)/(n-1)` or `1 < k < (n+3)/(n-1)`, with `m < k`.
    Wang,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub x: Axis,
    pub y: Axis,
    pub overlay: Option<Overlay>,
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    /// Defaults to the top-level `n`.
    pub n: Option<u32>,
    #[serde(default)]
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub u0: f64,
    pub radius: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub h: f64,
}

impl SolverConfig {
    pub fn radii(&self) -> std::result::Result<Vec<f64>, ConfigError> {
        match (&self.radius, &self.radii) {
            (Some(r), None) => Ok(vec![*r]),
            (None, Some(rs)) if !rs.is_empty() => Ok(rs.clone()),
            _ => Err(ConfigError::Invalid("solver needs exactly one of radius or a nonempty radii".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
    pub precision: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CommandKind {
    Analyze,
    Verdict,
    Scan,
    Verify,
    Constants,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Informational; the command line decides what runs.
    pub command: Option<CommandKind>,
    pub phi: PhiConfig,
    #[serde(default = "zero_psi")]
    pub psi: PsiConfig,
    pub n: Param,
    /// Nonnegative Ricci curvature and bounded solutions assumed.
    #[serde(default)]
    pub liouville: bool,
    pub scan: Option<ScanConfig>,
    #[serde(default)]
    pub space: SpaceConfig,
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn zero_psi() -> PsiConfig {
    PsiConfig::Zero
}

/// A configured problem with every variable substituted.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub phi: PhiSpec,
    pub psi: PsiSpec,
    pub n: u32,
}

impl RunConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.message().to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> std::result::Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read(path.to_path_buf(), e))?;
        Self::parse(&text)
    }

    fn check(&self) -> std::result::Result<(), ConfigError> {
        let mut params = self.operator_params();
        params.extend(self.psi_params());
        if let Some(Param::Var(s)) = params.iter().find(|p| matches!(p, Param::Var(_)) && p.var().is_none()) {
            return Err(ConfigError::Parse(format!("parameter {s:?} is neither a number nor a $variable")));
        }
        let bad_var = self.vars().into_iter().find(|v| match &self.scan {
            Some(s) => v != &s.x.name && v != &s.y.name,
            None => true,
        });
        if let Some(v) = bad_var {
            return Err(ConfigError::Invalid(format!("${v} is not a scan axis")));
        }
        if let Some(scan) = &self.scan {
            for axis in [&scan.x, &scan.y] {
                if axis.steps == 0 {
                    return Err(ConfigError::Invalid(format!("axis {} needs at least one step", axis.name)));
                }
                if !(axis.min.is_finite() && axis.max.is_finite()) || axis.min > axis.max {
                    return Err(ConfigError::Invalid(format!("axis {} has an empty range", axis.name)));
                }
            }
            if scan.x.name == scan.y.name {
                return Err(ConfigError::Invalid("scan axes need distinct names".into()));
            }
        }
        if let Some(p) = self.output.precision {
            check_precision(p)?;
        }
        Ok(())
    }

    fn operator_params(&self) -> Vec<&Param> {
        let mut params: Vec<&Param> = vec![&self.n];
        match &self.phi {
            PhiConfig::PowerLaw { p } => params.push(p),
            PhiConfig::Pq { p, q } => params.extend([p, q]),
            PhiConfig::SumOfPowers { exponents, weights } => {
                params.extend(exponents);
                params.extend(weights.iter().flatten());
            }
            _ => {}
        }
        params
    }

    fn psi_params(&self) -> Vec<&Param> {
        match &self.psi {
            PsiConfig::Zero => vec![],
            PsiConfig::Power { a, q } | PsiConfig::LogPower { a, q, .. } => vec![a, q],
            PsiConfig::DoublePower { m, k } => vec![m, k],
            PsiConfig::GeneralSum { a, p, b, q, c, d } => vec![a, p, b, q, c, d],
        }
    }

    /// Names of the scan variables referenced by the families and `n`.
    pub fn vars(&self) -> Vec<String> {
        let mut params = self.operator_params();
        params.extend(self.psi_params());
        let mut out: Vec<String> = params.iter().filter_map(|p| p.var()).map(str::to_string).collect();
        out.sort();
        out.dedup();
        out
    }

    /// True when neither `phi` nor `n` depends on a scan variable.
    pub fn operator_is_fixed(&self) -> bool {
        self.operator_params().iter().all(|p| matches!(p, Param::Value(_)))
    }

    pub fn precision(&self) -> usize {
        self.output.precision.unwrap_or(DEFAULT_PRECISION)
    }

    pub fn dimension(&self, vars: &BTreeMap<String, f64>) -> std::result::Result<u32, ConfigError> {
        let n = self.n.resolve(vars)?;
        if n.fract() != 0.0 || !(2.0..=1e6).contains(&n) {
            return Err(ConfigError::Invalid(format!("dimension {n} must be an integer >= 2")));
        }
        Ok(n as u32)
    }

    /// `phi` with the scan variables substituted; construction errors are
    /// family errors.
    pub fn phi_spec(&self, vars: &BTreeMap<String, f64>) -> std::result::Result<Result<PhiSpec>, ConfigError> {
        let r = |p: &Param| p.resolve(vars);
        Ok(match &self.phi {
            PhiConfig::ConstantOne => Ok(PhiSpec::ConstantOne),
            PhiConfig::PowerLaw { p } => PhiSpec::power_law(r(p)?),
            PhiConfig::Pq { p, q } => PhiSpec::pq(r(p)?, r(q)?),
            PhiConfig::SumOfPowers { exponents, weights } => {
                let exps = exponents.iter().map(r).collect::<std::result::Result<Vec<_>, _>>()?;
                let ws = match weights {
                    Some(ws) if ws.len() != exps.len() => {
                        return Err(ConfigError::Invalid("weights and exponents differ in length".into()))
                    }
                    Some(ws) => ws.iter().map(r).collect::<std::result::Result<Vec<_>, _>>()?,
                    None => vec![1.0; exps.len()],
                };
                let terms = ws.into_iter().zip(exps).map(|(weight, exponent)| PowerTerm { weight, exponent }).collect();
                PowerSum::normalized(terms).map(PhiSpec::SumOfPowers)
            }
            PhiConfig::Exponential => Ok(PhiSpec::Exponential),
            PhiConfig::MeanCurvature => Ok(PhiSpec::MeanCurvature),
        })
    }

    /// `psi` with the scan variables substituted, not yet validated.
    pub fn psi_spec(&self, vars: &BTreeMap<String, f64>) -> std::result::Result<PsiSpec, ConfigError> {
        let r = |p: &Param| p.resolve(vars);
        Ok(match &self.psi {
            PsiConfig::Zero => PsiSpec::Zero,
            PsiConfig::Power { a, q } => PsiSpec::Power { a: r(a)?, q: r(q)? },
            PsiConfig::DoublePower { m, k } => PsiSpec::DoublePower { m: r(m)?, k: r(k)? },
            PsiConfig::LogPower { a, q, m_num, m_den } => {
                PsiSpec::LogPower { a: r(a)?, q: r(q)?, m: OddRational::new(*m_num, *m_den)? }
            }
            PsiConfig::GeneralSum { a, p, b, q, c, d } => PsiSpec::GeneralSum {
                a: r(a)?,
                p: r(p)?,
                b: r(b)?,
                q: r(q)?,
                c: r(c)?,
                d: r(d)?,
            },
        })
    }

    /// Builds the families with the scan variables substituted. Family
    /// parameter errors are reported as [`Error::InvalidSpec`].
    pub fn instance(&self, vars: &BTreeMap<String, f64>) -> std::result::Result<Result<Instance>, ConfigError> {
        let n = self.dimension(vars)?;
        let phi = self.phi_spec(vars)?;
        let psi = self.psi_spec(vars)?;
        Ok(phi.and_then(|phi| {
            phi.validate()?;
            psi.validate()?;
            Ok(Instance { phi, psi, n })
        }))
    }

    /// The instance with no scan variables bound.
    pub fn fixed_instance(&self) -> std::result::Result<Result<Instance>, ConfigError> {
        self.instance(&BTreeMap::new())
    }

    pub fn model_space(&self) -> std::result::Result<Result<ModelSpace>, ConfigError> {
        let n = match self.space.n {
            Some(n) => n,
            None => self.dimension(&BTreeMap::new())?,
        };
        Ok(ModelSpace::new(n, self.space.k))
    }
}

pub fn check_precision(p: usize) -> std::result::Result<(), ConfigError> {
    if (6..=17).contains(&p) {
        Ok(())
    } else {
        Err(ConfigError::Invalid(format!("precision {p} outside 6..=17")))
    }
}

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}
