//! Degree bounds of `phi`: the range `[l, d]` of the degree function and the
//! range `[gamma, Gamma]` of
//!
//! ```text
//! Q_n(t) = (delta(t) + 1)^2 / (n - 1) - 2 t delta'(t).
//! ```

use std::fmt;

use crate::ext::ExtReal;
use crate::families::PhiSpec;
use crate::search::{numeric_inf_sup_window, EndpointLimits, InfSup, Witness, LN_T_MAX, LN_T_MIN};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Numeric,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::Numeric => "numeric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeBounds {
    pub l: ExtReal,
    pub d: ExtReal,
    pub l_witness: Witness,
    pub d_witness: Witness,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedPhi2 {
    pub gamma: f64,
    pub big_gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phi2Bounds {
    /// Closed form from the family's discriminant analysis, when one exists.
    pub closed: Option<ClosedPhi2>,
    pub numeric: InfSup,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeProfile {
    pub n: u32,
    pub l: ExtReal,
    pub d: ExtReal,
    pub l_witness: Witness,
    pub d_witness: Witness,
    /// Numeric infimum of `Q_n`.
    pub gamma: ExtReal,
    pub gamma_witness: Witness,
    /// Closed-form supremum where the family has one, otherwise numeric.
    pub big_gamma: ExtReal,
    pub big_gamma_witness: Witness,
    pub gamma_closed: Option<f64>,
    pub big_gamma_closed: Option<f64>,
    pub big_gamma_numeric: ExtReal,
    pub phi1_ok: bool,
    pub phi2_ok: bool,
    pub method: Method,
}

impl DegreeProfile {
    pub fn phi1_margin(&self) -> ExtReal {
        if self.d.is_finite() {
            match self.l {
                ExtReal::Finite(l) => ExtReal::Finite(l + 1.0),
                other => other,
            }
        } else {
            ExtReal::NegInf
        }
    }

    pub fn phi2_margin(&self) -> ExtReal {
        if self.big_gamma.is_finite() {
            self.gamma
        } else {
            ExtReal::NegInf
        }
    }
}

/// `Q_n(t)` with the literal dimension `n`.
pub fn q_function(phi: &PhiSpec, n: u32, t: f64) -> f64 {
    q_function_dim(phi, n as f64, t)
}

/// `Q` with a real dimension parameter, e.g. a substitute `n' > 2` for `n = 2`.
pub fn q_function_dim(phi: &PhiSpec, dim: f64, t: f64) -> f64 {
    q_ln(phi, dim, t.ln())
}

fn q_ln(phi: &PhiSpec, dim: f64, lt: f64) -> f64 {
    let (delta, pair) = phi.degree_ln(lt);
    let x = delta + 1.0;
    x * x / (dim - 1.0) - pair
}

pub fn degree_bounds(phi: &PhiSpec) -> DegreeBounds {
    let fixed = |v: f64| DegreeBounds {
        l: ExtReal::Finite(v),
        d: ExtReal::Finite(v),
        l_witness: Witness::Everywhere,
        d_witness: Witness::Everywhere,
    };
    match phi {
        PhiSpec::ConstantOne => fixed(0.0),
        PhiSpec::PowerLaw { p } => fixed(p - 2.0),
        PhiSpec::SumOfPowers(sum) if sum.terms().len() == 1 => fixed(sum.p_min() - 2.0),
        PhiSpec::SumOfPowers(sum) => DegreeBounds {
            l: ExtReal::Finite(sum.p_min() - 2.0),
            d: ExtReal::Finite(sum.p_max() - 2.0),
            l_witness: Witness::ZeroLimit,
            d_witness: Witness::InfinityLimit,
        },
        PhiSpec::Exponential => DegreeBounds {
            l: ExtReal::Finite(0.0),
            d: ExtReal::PosInf,
            l_witness: Witness::ZeroLimit,
            d_witness: Witness::InfinityLimit,
        },
        PhiSpec::MeanCurvature => DegreeBounds {
            l: ExtReal::Finite(-1.0),
            d: ExtReal::Finite(0.0),
            l_witness: Witness::InfinityLimit,
            d_witness: Witness::ZeroLimit,
        },
    }
}

fn delta_limits(phi: &PhiSpec) -> EndpointLimits {
    let f = ExtReal::Finite;
    let (z, i) = match phi {
        PhiSpec::ConstantOne => (f(0.0), f(0.0)),
        PhiSpec::PowerLaw { p } => (f(p - 2.0), f(p - 2.0)),
        PhiSpec::SumOfPowers(sum) => (f(sum.p_min() - 2.0), f(sum.p_max() - 2.0)),
        PhiSpec::Exponential => (f(0.0), ExtReal::PosInf),
        PhiSpec::MeanCurvature => (f(0.0), f(-1.0)),
    };
    EndpointLimits { at_zero: z, at_infinity: i }
}

/// `ln t` window for the numeric searches. Power sums with close exponents mix
/// over a much wider range of `t` than `[1e-12, 1e12]`, so the window is
/// widened until every pair of terms is saturated (weight ratio beyond
/// `e^30`), capped where `t` stays representable.
pub fn search_window(phi: &PhiSpec) -> (f64, f64) {
    let PhiSpec::SumOfPowers(sum) = phi else {
        return (LN_T_MIN, LN_T_MAX);
    };
    let terms = sum.terms();
    let (mut lo, mut hi) = (LN_T_MIN, LN_T_MAX);
    for i in 0..terms.len() {
        for j in i + 1..terms.len() {
            let half_gap = 0.5 * (terms[j].exponent - terms[i].exponent);
            let centre = (terms[i].weight / terms[j].weight).ln() / half_gap;
            lo = lo.min(centre - 30.0 / half_gap);
            hi = hi.max(centre + 30.0 / half_gap);
        }
    }
    (lo.max(-700.0), hi.min(700.0))
}

/// Numeric search for the range of the degree function; used to cross-check
/// [`degree_bounds`].
pub fn degree_bounds_numeric(phi: &PhiSpec) -> InfSup {
    let (lo, hi) = search_window(phi);
    numeric_inf_sup_window(|lt| phi.degree_ln(lt).0, delta_limits(phi), lo, hi)
}

fn q_limits(phi: &PhiSpec, dim: f64) -> EndpointLimits {
    let at = |delta: f64| ExtReal::Finite((delta + 1.0).powi(2) / (dim - 1.0));
    let lim = delta_limits(phi);
    let at_infinity = match phi {
        PhiSpec::Exponential => ExtReal::PosInf,
        _ => at(lim.at_infinity.to_f64()),
    };
    EndpointLimits { at_zero: at(lim.at_zero.to_f64()), at_infinity }
}

/// Closed forms: `(p-1)^2/(n-1)` for a single power; for two powers
/// `gamma = (4(p-1)(q-1) - (n-1)(q-p)^2)/(4n)`, the exact minimum of `Q` over
/// the mixing weight; for more powers `gamma = (p_1-1)^2/(n-1) - (p_r-p_1)^2/2`.
/// In every case `Gamma = (p_max-1)^2/(n-1)`.
pub fn closed_phi2(phi: &PhiSpec, dim: f64) -> Option<ClosedPhi2> {
    let (lo, hi) = phi.exponent_range()?;
    let terms = match phi {
        PhiSpec::SumOfPowers(sum) => sum.terms().len(),
        _ => 1,
    };
    let big_gamma = (hi - 1.0).powi(2) / (dim - 1.0);
    let gamma = match terms {
        1 => big_gamma,
        2 => (4.0 * (lo - 1.0) * (hi - 1.0) - (dim - 1.0) * (hi - lo).powi(2)) / (4.0 * dim),
        _ => (lo - 1.0).powi(2) / (dim - 1.0) - (hi - lo).powi(2) / 2.0,
    };
    Some(ClosedPhi2 { gamma, big_gamma })
}

pub fn phi2_bounds(phi: &PhiSpec, n: u32) -> Phi2Bounds {
    phi2_bounds_dim(phi, n as f64)
}

pub fn phi2_bounds_dim(phi: &PhiSpec, dim: f64) -> Phi2Bounds {
    let (lo, hi) = search_window(phi);
    let numeric = numeric_inf_sup_window(|lt| q_ln(phi, dim, lt), q_limits(phi, dim), lo, hi);
    Phi2Bounds { closed: closed_phi2(phi, dim), numeric }
}

pub fn profile(phi: &PhiSpec, n: u32) -> DegreeProfile {
    assert!(n >= 2, "dimension must be at least 2");
    let bounds = degree_bounds(phi);
    let phi2 = phi2_bounds(phi, n);
    let (big_gamma, big_gamma_witness) = match phi2.closed {
        Some(c) => {
            let witness = match phi2.numeric.sup.witness {
                Witness::Everywhere => Witness::Everywhere,
                _ => Witness::InfinityLimit,
            };
            (ExtReal::Finite(c.big_gamma), witness)
        }
        None => (phi2.numeric.sup.value, phi2.numeric.sup.witness),
    };
    let gamma = phi2.numeric.inf.value;
    let phi1_ok = bounds.l > ExtReal::Finite(-1.0) && bounds.d.is_finite();
    let phi2_ok = gamma > ExtReal::Finite(0.0) && big_gamma.is_finite();
    DegreeProfile {
        n,
        l: bounds.l,
        d: bounds.d,
        l_witness: bounds.l_witness,
        d_witness: bounds.d_witness,
        gamma,
        gamma_witness: phi2.numeric.inf.witness,
        big_gamma,
        big_gamma_witness,
        gamma_closed: phi2.closed.map(|c| c.gamma),
        big_gamma_closed: phi2.closed.map(|c| c.big_gamma),
        big_gamma_numeric: phi2.numeric.sup.value,
        phi1_ok,
        phi2_ok,
        method: if phi2.closed.is_some() { Method::ClosedForm } else { Method::Numeric },
    }
}
