//! Two-parameter admissibility scans.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::config::{Axis, ConfigError, Overlay, RunConfig};
use crate::degree::{profile, DegreeProfile};
use crate::families::PsiSpec;
use crate::report::{format_number, render_svg, Csv, Layer, RegionPlot};
use crate::verdict::{classify_profiled, ClassifyOptions, Verdict};
use crate::Error;

pub const MAX_CELLS: u64 = 10_000_000;

#[derive(Debug)]
pub enum ScanError {
    Config(ConfigError),
    TooLarge(u64),
    /// Classification failed for a reason other than invalid parameters.
    Cell { x: f64, y: f64, error: Error },
}

impl std::fmt::Display for ScanError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScanError::Config(e) => e.fmt(f),
            ScanError::TooLarge(n) => write!(f, "scan grid has {n} cells, more than {MAX_CELLS}"),
            ScanError::Cell { x, y, error } => write!(f, "cell ({x}, {y}): {error}"),
        }
    }
}

impl std::error::Error for ScanError {}

impl From<ConfigError> for ScanError {
    fn from(e: ConfigError) -> Self {
        ScanError::Config(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissible {
    No = 0,
    Yes = 1,
    /// Within [`crate::verdict::BOUNDARY_TOL`] of a strict inequality.
    Boundary = 2,
}

impl Admissible {
    pub fn of(verdict: &Verdict) -> Self {
        if verdict.is_boundary() {
            Admissible::Boundary
        } else if verdict.applicable() {
            Admissible::Yes
        } else {
            Admissible::No
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanCell {
    pub x: f64,
    pub y: f64,
    pub admissible: Admissible,
    /// Smallest slack over the conditions; NaN for invalid parameters.
    pub margin: f64,
    pub comparison: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub x: Axis,
    pub y: Axis,
    pub overlay: Option<Overlay>,
    /// `x` outer, `y` inner.
    pub cells: Vec<ScanCell>,
}

/// Region where the earlier Liouville result for `u^m - u^k` applies.
pub fn wang_region(m: f64, k: f64, n: u32) -> bool {
    let c = (n as f64 + 3.0) / (n as f64 - 1.0);
    m < k && ((1.0 < m && m < c) || (1.0 < k && k < c))
}

pub fn run_scan(cfg: &RunConfig) -> Result<ScanResult, ScanError> {
    let scan = cfg.scan.as_ref().ok_or_else(|| ConfigError::Invalid("scan needs a [scan] section".into()))?;
    let total = scan.x.steps.saturating_mul(scan.y.steps);
    if total > MAX_CELLS {
        return Err(ScanError::TooLarge(total));
    }
    if scan.overlay == Some(Overlay::Wang) && !matches!(cfg.psi, crate::config::PsiConfig::DoublePower { .. }) {
        return Err(ConfigError::Invalid("the wang overlay needs a double_power reaction".into()).into());
    }
    let vars = |i: u64, j: u64| {
        BTreeMap::from([(scan.x.name.clone(), scan.x.value(i)), (scan.y.name.clone(), scan.y.value(j))])
    };

    // one profile for the whole grid when the operator does not vary
    let shared: Option<DegreeProfile> = if cfg.operator_is_fixed() {
        let v = vars(0, 0);
        match cfg.phi_spec(&v)? {
            Ok(phi) => Some(profile(&phi, cfg.dimension(&v)?)),
            Err(_) => None,
        }
    } else {
        None
    };
    let options = ClassifyOptions { liouville: cfg.liouville, ..Default::default() };

    let cells = (0..total)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / scan.y.steps, idx % scan.y.steps);
            let v = vars(i, j);
            let (x, y) = (scan.x.value(i), scan.y.value(j));
            let n = cfg.dimension(&v)?;
            let psi = cfg.psi_spec(&v)?;
            let comparison = match (scan.overlay, &psi) {
                (Some(Overlay::Wang), PsiSpec::DoublePower { m, k }) => Some(wang_region(*m, *k, n)),
                _ => None,
            };
            let verdict = cfg.phi_spec(&v)?.and_then(|phi| {
                let degree = match &shared {
                    Some(d) => d.clone(),
                    None => {
                        phi.validate()?;
                        profile(&phi, n)
                    }
                };
                classify_profiled(&phi, &psi, degree, options)
            });
            let (admissible, margin) = match verdict {
                Ok(v) => (Admissible::of(&v), v.margin().to_f64()),
                Err(Error::InvalidSpec(_)) => (Admissible::No, f64::NAN),
                Err(error) => return Err(ScanError::Cell { x, y, error }),
            };
            Ok(ScanCell { x, y, admissible, margin, comparison })
        })
        .collect::<Result<Vec<_>, ScanError>>()?;
    Ok(ScanResult { x: scan.x.clone(), y: scan.y.clone(), overlay: scan.overlay, cells })
}

impl ScanResult {
    pub fn to_csv(&self, precision: usize) -> Csv {
        let mut header = vec![self.x.name.as_str(), self.y.name.as_str(), "admissible", "margin"];
        if self.overlay.is_some() {
            header.push("comparison");
        }
        let mut csv = Csv::new(&header);
        for c in &self.cells {
            let mut row = vec![
                format_number(c.x, precision),
                format_number(c.y, precision),
                (c.admissible as u8).to_string(),
                format_number(c.margin, precision),
            ];
            if let Some(b) = c.comparison {
                row.push(u8::from(b).to_string());
            }
            csv.push(row);
        }
        csv
    }

    pub fn to_svg(&self) -> String {
        let admissible: Vec<bool> = self.cells.iter().map(|c| c.admissible == Admissible::Yes).collect();
        let boundary: Vec<bool> = self.cells.iter().map(|c| c.admissible == Admissible::Boundary).collect();
        let mut layers = vec![
            Layer { name: "admissible", fill: "#3b6fb6", opacity: 0.8, cells: &admissible },
            Layer { name: "boundary", fill: "#202020", opacity: 0.8, cells: &boundary },
        ];
        let comparison: Vec<bool> = self.cells.iter().map(|c| c.comparison == Some(true)).collect();
        if self.overlay.is_some() {
            layers.push(Layer { name: "comparison", fill: "#d9822b", opacity: 0.5, cells: &comparison });
        }
        render_svg(&RegionPlot {
            x_label: &self.x.name,
            y_label: &self.y.name,
            x_range: (self.x.min, self.x.max),
            y_range: (self.y.min, self.y.max),
            nx: self.x.steps as usize,
            ny: self.y.steps as usize,
            layers,
        })
    }
}
