//! Applicability of the gradient estimate, the Liouville classification, and
//! the closed-form conditions for the power-type operator families.

use std::fmt;

use crate::coupling::{coupling_profile, iteration_constants, sample_grid, CouplingProfile, IterationConstants};
use crate::degree::{profile, DegreeProfile};
use crate::ext::ExtReal;
use crate::families::{eval_psi, OddRational, PhiSpec, PsiSpec};
use crate::{Error, Result};

/// Margins closer to zero than this are reported as boundary cases.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Finite degree bounds with `l > -1`.
    Phi1,
    /// `gamma > 0` and `Gamma` finite.
    Phi2,
    /// `Theta < 4 gamma/(n-1)`.
    Psi2,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Phi1 => "phi1",
            Condition::Phi2 => "phi2",
            Condition::Psi2 => "psi2",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LiouvilleConclusion {
    /// Bounded positive solutions are constant, equal to one of `values`
    /// (the square roots of the positive zeros of `psi`).
    ConstantSolution { values: Vec<f64> },
    /// `psi` vanishes identically; every positive constant solves the equation.
    AnyConstant,
    NoPositiveBoundedSolution,
}

impl fmt::Display for LiouvilleConclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiouvilleConclusion::ConstantSolution { values } => {
                f.write_str("u is constant, u = ")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" or ")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
            LiouvilleConclusion::AnyConstant => f.write_str("u is constant"),
            LiouvilleConclusion::NoPositiveBoundedSolution => f.write_str("no positive bounded solution"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assessment {
    pub degree: DegreeProfile,
    pub coupling: CouplingProfile,
    pub constants: IterationConstants,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    NotApplicable {
        failed: Condition,
        detail: String,
        margin: ExtReal,
        degree: DegreeProfile,
        coupling: Option<CouplingProfile>,
    },
    EstimateHolds(Box<Assessment>),
    Liouville {
        assessment: Box<Assessment>,
        conclusion: LiouvilleConclusion,
    },
}

impl Verdict {
    pub fn applicable(&self) -> bool {
        !matches!(self, Verdict::NotApplicable { .. })
    }

    pub fn degree(&self) -> &DegreeProfile {
        match self {
            Verdict::NotApplicable { degree, .. } => degree,
            Verdict::EstimateHolds(a) | Verdict::Liouville { assessment: a, .. } => &a.degree,
        }
    }

    pub fn coupling(&self) -> Option<&CouplingProfile> {
        match self {
            Verdict::NotApplicable { coupling, .. } => coupling.as_ref(),
            Verdict::EstimateHolds(a) | Verdict::Liouville { assessment: a, .. } => Some(&a.coupling),
        }
    }

    /// Smallest slack over the three conditions; positive iff applicable.
    pub fn margin(&self) -> ExtReal {
        match self {
            Verdict::NotApplicable { margin, .. } => *margin,
            Verdict::EstimateHolds(a) | Verdict::Liouville { assessment: a, .. } => a
                .degree
                .phi1_margin()
                .min(a.degree.phi2_margin())
                .min(a.coupling.margin),
        }
    }

    pub fn is_boundary(&self) -> bool {
        self.margin().finite().is_some_and(|m| m.abs() < BOUNDARY_TOL)
    }

    pub fn status(&self) -> &'static str {
        match self {
            Verdict::NotApplicable { .. } => "not_applicable",
            Verdict::EstimateHolds(_) => "estimate_holds",
            Verdict::Liouville { .. } => "liouville",
        }
    }
}

/// Source of `gamma` used by the reaction condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaSource {
    /// Numeric infimum of `Q_n`, the sharpest bound.
    #[default]
    NumericInfimum,
    /// The family's closed form (falls back to the numeric value when none).
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassifyOptions {
    pub gamma_source: GammaSource,
    /// Nonnegative Ricci curvature and bounded solutions: add the Liouville
    /// conclusion.
    pub liouville: bool,
}

pub fn classify(phi: &PhiSpec, psi: &PsiSpec, n: u32, assume_nonneg_ricci_bounded: bool) -> Result<Verdict> {
    classify_with(phi, psi, n, ClassifyOptions { liouville: assume_nonneg_ricci_bounded, ..Default::default() })
}

pub fn classify_with(phi: &PhiSpec, psi: &PsiSpec, n: u32, options: ClassifyOptions) -> Result<Verdict> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!("dimension {n} must be at least 2")));
    }
    phi.validate()?;
    classify_profiled(phi, psi, profile(phi, n), options)
}

/// [`classify_with`] for a degree profile already computed for `phi`, e.g.
/// shared across a scan over reaction parameters.
pub fn classify_profiled(phi: &PhiSpec, psi: &PsiSpec, mut degree: DegreeProfile, options: ClassifyOptions) -> Result<Verdict> {
    psi.validate()?;
    if options.gamma_source == GammaSource::ClosedForm {
        if let Some(g) = degree.gamma_closed {
            degree.gamma = ExtReal::Finite(g);
            degree.phi2_ok = g > 0.0 && degree.big_gamma.is_finite();
        }
    }

    if !degree.phi1_ok {
        let detail = if degree.d.is_finite() {
            format!("l = {} does not exceed -1", degree.l)
        } else {
            format!("d = {}", degree.d)
        };
        return Ok(Verdict::NotApplicable {
            failed: Condition::Phi1,
            detail,
            margin: degree.phi1_margin(),
            degree,
            coupling: None,
        });
    }
    if !degree.phi2_ok {
        let detail = if degree.big_gamma.is_finite() {
            format!("gamma = {} is not positive", degree.gamma)
        } else {
            format!("Gamma = {}", degree.big_gamma)
        };
        return Ok(Verdict::NotApplicable {
            failed: Condition::Phi2,
            detail,
            margin: degree.phi2_margin(),
            degree,
            coupling: None,
        });
    }

    let coupling = coupling_profile(phi, psi, &degree)?;
    if !coupling.psi2_ok {
        return Ok(Verdict::NotApplicable {
            failed: Condition::Psi2,
            detail: format!("Theta = {} is not below 4 gamma/(n-1) = {}", coupling.theta_big, coupling.threshold),
            margin: coupling.margin,
            degree,
            coupling: Some(coupling),
        });
    }

    let constants = iteration_constants(&degree)?;
    let assessment = Box::new(Assessment { degree, coupling, constants });
    if options.liouville {
        Ok(Verdict::Liouville { assessment, conclusion: liouville_conclusion(psi) })
    } else {
        Ok(Verdict::EstimateHolds(assessment))
    }
}

/// Bounded positive solutions on a manifold with nonnegative Ricci curvature,
/// given that the estimate applies: constants `sqrt(T)` with `psi(T) = 0`.
pub fn liouville_conclusion(psi: &PsiSpec) -> LiouvilleConclusion {
    let roots = match *psi {
        PsiSpec::Zero => return LiouvilleConclusion::AnyConstant,
        PsiSpec::Power { .. } => Vec::new(),
        PsiSpec::DoublePower { .. } => vec![1.0],
        PsiSpec::LogPower { m, .. } => {
            if m.value() > 0.0 {
                vec![1.0]
            } else {
                Vec::new()
            }
        }
        PsiSpec::GeneralSum { .. } => psi_roots(psi),
    };
    if roots.is_empty() {
        LiouvilleConclusion::NoPositiveBoundedSolution
    } else {
        LiouvilleConclusion::ConstantSolution { values: roots.iter().map(|t| t.sqrt()).collect() }
    }
}

/// Positive zeros of `psi` located by sign changes on the sampling grid and
/// refined by bisection.
pub fn psi_roots(psi: &PsiSpec) -> Vec<f64> {
    let grid = sample_grid();
    let value = |t: f64| eval_psi(psi, t).unwrap_or(f64::NAN);
    let mut roots = Vec::new();
    let mut prev = (grid[0], value(grid[0]));
    if prev.1 == 0.0 {
        roots.push(prev.0);
    }
    for &t in &grid[1..] {
        let v = value(t);
        if v == 0.0 {
            roots.push(t);
        } else if prev.1 != 0.0 && v.signum() != prev.1.signum() && v.is_finite() && prev.1.is_finite() {
            let (mut lo, mut hi, mut f_lo) = (prev.0, t, prev.1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = value(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == f_lo.signum() {
                    lo = mid;
                    f_lo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = (t, v);
    }
    roots
}

/// Harnack inequality implied by the estimate, with the constant left
/// symbolic.
pub fn harnack_form(curvature_zero: bool) -> &'static str {
    if curvature_zero {
        "sup u <= C inf u on B(o,R)"
    } else {
        "u(x)/u(y) <= exp(C (1 + sqrt(K) R)) for x, y in B(o,R)"
    }
}

/// First and second critical dimensions of a weighted power operator.
pub fn critical_dimensions(p_min: f64, p_max: f64) -> (ExtReal, ExtReal) {
    if p_max == p_min {
        return (ExtReal::PosInf, ExtReal::PosInf);
    }
    let n1 = 2.0 * ((p_min - 1.0) / (p_max - p_min)).powi(2) + 1.0;
    let n2 = (2.0 * n1 + 3.0).sqrt() - 2.0;
    (ExtReal::Finite(n1), ExtReal::Finite(n2))
}

fn below(n: u32, bound: ExtReal) -> bool {
    ExtReal::Finite(n as f64) < bound
}

/// `4(p-1)(q-1) - (n-1)(p-q)^2`; the `(p,q)`-Laplacian condition is that this
/// is positive.
pub fn corollary_pq_margin(p: f64, q: f64, n: u32) -> f64 {
    4.0 * (p - 1.0) * (q - 1.0) - (n as f64 - 1.0) * (p - q) * (p - q)
}

pub fn corollary_pq(p: f64, q: f64, n: u32) -> bool {
    (n as f64 - 1.0) * (p - q) * (p - q) < 4.0 * (p - 1.0) * (q - 1.0)
}

/// `(n-1)(p_r-p_1)^2 < 2(p_1-1)^2`, i.e. `n < N1`.
pub fn corollary_weighted(p_list: &[f64], n: u32) -> bool {
    let p1 = p_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let pr = p_list.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    (n as f64 - 1.0) * (pr - p1) * (pr - p1) < 2.0 * (p1 - 1.0) * (p1 - 1.0)
}

fn ratio(n: u32) -> f64 {
    (n as f64 + 1.0) / (n as f64 - 1.0)
}

/// `2 sqrt(1/(n-1)^2 - (pr-p1)^2/(2(n-1)(p1-1)^2))`, the slack added to the
/// lower exponent bound.
fn lower_slack(p1: f64, pr: f64, n: u32) -> f64 {
    let nm = n as f64 - 1.0;
    2.0 * (1.0 / (nm * nm) - (pr - p1).powi(2) / (2.0 * nm * (p1 - 1.0).powi(2))).sqrt()
}

/// `2 sqrt((p1-1)^2/((n-1)^2 (pr-1)^2) - (pr-p1)^2/(2(n-1)(pr-1)^2))`.
fn upper_slack(p1: f64, pr: f64, n: u32) -> f64 {
    let nm = n as f64 - 1.0;
    2.0 * ((p1 - 1.0).powi(2) / (nm * nm * (pr - 1.0).powi(2)) - (pr - p1).powi(2) / (2.0 * nm * (pr - 1.0).powi(2)))
        .sqrt()
}

fn check_exponents(p_min: f64, p_max: f64) -> Result<()> {
    if !(p_min > 1.0 && p_max >= p_min) {
        return Err(Error::Precondition(format!("exponents need 1 < p_min <= p_max (got {p_min}, {p_max})")));
    }
    Ok(())
}

fn require_below_first(p_min: f64, p_max: f64, n: u32) -> Result<()> {
    let (n1, _) = critical_dimensions(p_min, p_max);
    if !below(n, n1) {
        return Err(Error::Precondition(format!("dimension {n} is not below the first critical dimension {n1}")));
    }
    Ok(())
}

/// The stated condition for `Delta_{p_1..p_r} u + a u^q = 0`:
/// `a > 0` and `q/(p_1-1) < c + lower_slack`, or `a < 0` and
/// `q/(p_r-1) > c - upper_slack`, with `c = (n+1)/(n-1)`.
pub fn theorem_power_reaction(p_min: f64, p_max: f64, a: f64, q: f64, n: u32) -> Result<bool> {
    check_exponents(p_min, p_max)?;
    require_below_first(p_min, p_max, n)?;
    let c = ratio(n);
    if a > 0.0 {
        Ok(q / (p_min - 1.0) < c + lower_slack(p_min, p_max, n))
    } else if a < 0.0 {
        Ok(q / (p_max - 1.0) > c - upper_slack(p_min, p_max, n))
    } else {
        Err(Error::Precondition("reaction coefficient a must be nonzero".into()))
    }
}

/// `(n+1)^2/2 + (n-1) < 2(p_1-1)^2/(p_r-p_1)^2`; equivalent to `n < N2`.
pub fn umusc1(p_min: f64, p_max: f64, n: u32) -> bool {
    if p_min == p_max {
        return true;
    }
    let nn = n as f64;
    (nn + 1.0).powi(2) / 2.0 + (nn - 1.0) < 2.0 * (p_min - 1.0).powi(2) / (p_max - p_min).powi(2)
}

/// Condition for `Delta_{p_1..p_r} u + u^m - u^k = 0`.
pub fn theorem_double_power(p_min: f64, p_max: f64, m: f64, k: f64, n: u32) -> Result<bool> {
    check_exponents(p_min, p_max)?;
    if !(m < k) {
        return Err(Error::Precondition(format!("double power needs m < k (got m={m}, k={k})")));
    }
    require_below_first(p_min, p_max, n)?;
    let c = ratio(n);
    if k >= c * (p_max - 1.0) && m <= c * (p_min - 1.0) {
        return Ok(true);
    }
    let (_, n2) = critical_dimensions(p_min, p_max);
    if !below(n, n2) {
        return Ok(false);
    }
    let weak_k = k / (p_max - 1.0) > c - upper_slack(p_min, p_max, n);
    let weak_m = m / (p_min - 1.0) < c + lower_slack(p_min, p_max, n);
    Ok(weak_k && weak_m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogReactionOutcome {
    pub estimate: bool,
    /// Conclusion on manifolds with nonnegative Ricci curvature when the
    /// estimate holds.
    pub conclusion: LiouvilleConclusion,
}

/// Condition for `Delta_{p_1..p_r} u + a u^q (log u)^m = 0`.
pub fn theorem_log_reaction(p_min: f64, p_max: f64, a: f64, q: f64, m: OddRational, n: u32) -> Result<LogReactionOutcome> {
    check_exponents(p_min, p_max)?;
    if !(a * m.value() < 0.0) {
        return Err(Error::Precondition("log reaction needs a * m < 0".into()));
    }
    let (_, n2) = critical_dimensions(p_min, p_max);
    if !below(n, n2) {
        return Err(Error::Precondition(format!("dimension {n} is not below the second critical dimension {n2}")));
    }
    let c = ratio(n);
    let estimate =
        q / (p_max - 1.0) > c - upper_slack(p_min, p_max, n) && q / (p_min - 1.0) < c + lower_slack(p_min, p_max, n);
    let conclusion = if m.value() > 0.0 {
        LiouvilleConclusion::ConstantSolution { values: vec![1.0] }
    } else {
        LiouvilleConclusion::NoPositiveBoundedSolution
    };
    Ok(LogReactionOutcome { estimate, conclusion })
}
