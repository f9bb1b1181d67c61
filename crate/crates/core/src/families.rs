//! Symbolic families for the diffusion coefficient `phi` and the reaction
//! coefficient `psi`, with pointwise evaluation of the functions, their
//! degree functions and the radial flux map `G(w) = phi(w^2) w`.
//!
//! All formulas are written in the variable `t = |grad u|^2` (for `phi`) and
//! `t = u^2` (for `psi`).

use std::fmt;

use crate::ext::ExtReal;
use crate::{Error, Result};

/// One term `a t^{p/2 - 1}` of a weighted power sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    pub weight: f64,
    pub exponent: f64,
}

/// Validated weighted power sum: weights positive, exponents > 1 and strictly
/// increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSum {
    terms: Vec<PowerTerm>,
}

impl PowerSum {
    /// Accepts terms in the canonical form (strictly increasing exponents).
    pub fn new(terms: Vec<PowerTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidSpec("power sum needs at least one term".into()));
        }
        for term in &terms {
            if !(term.weight > 0.0 && term.weight.is_finite()) {
                return Err(Error::InvalidSpec(format!("weight {} must be positive", term.weight)));
            }
            if !(term.exponent > 1.0 && term.exponent.is_finite()) {
                return Err(Error::InvalidSpec(format!("exponent {} must exceed 1", term.exponent)));
            }
        }
        if terms.windows(2).any(|w| w[0].exponent >= w[1].exponent) {
            return Err(Error::InvalidSpec("exponents must be strictly increasing".into()));
        }
        Ok(Self { terms })
    }

    /// Sorts by exponent and merges equal exponents by adding weights, so
    /// `(1,p) + (1,p)` is accepted as `(2,p)`.
    pub fn normalized(mut terms: Vec<PowerTerm>) -> Result<Self> {
        terms.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        let mut merged: Vec<PowerTerm> = Vec::with_capacity(terms.len());
        for term in terms {
            match merged.last_mut() {
                Some(last) if last.exponent == term.exponent => last.weight += term.weight,
                _ => merged.push(term),
            }
        }
        Self::new(merged)
    }

    /// Equal-weight sum over the given exponents.
    pub fn unit_weights(exponents: &[f64]) -> Result<Self> {
        Self::normalized(exponents.iter().map(|&p| PowerTerm { weight: 1.0, exponent: p }).collect())
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn p_min(&self) -> f64 {
        self.terms[0].exponent
    }

    pub fn p_max(&self) -> f64 {
        self.terms[self.terms.len() - 1].exponent
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| PowerTerm { weight: t.weight * c, exponent: t.exponent })
                .collect(),
        }
    }

    fn phi(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.weight * t.powf(term.exponent / 2.0 - 1.0)).sum()
    }

    /// `(delta, 2 t delta')` at `t = exp(lt)`, computed with weights normalised
    /// in log space so that neither large nor tiny `t` overflows.
    fn degree_ln(&self, lt: f64) -> (f64, f64) {
        if self.terms.len() == 1 {
            return (self.terms[0].exponent - 2.0, 0.0);
        }
        if self.terms.len() == 2 {
            // logistic weight of the larger exponent
            let (a, b) = (self.terms[0], self.terms[1]);
            let z = (b.weight / a.weight).ln() + 0.5 * (b.exponent - a.exponent) * lt;
            let e = (-z.abs()).exp();
            let (small, large) = (e / (1.0 + e), 1.0 / (1.0 + e));
            let (w_lo, w_hi) = if z >= 0.0 { (small, large) } else { (large, small) };
            let dp = b.exponent - a.exponent;
            let delta = (a.exponent - 2.0) * w_lo + (b.exponent - 2.0) * w_hi;
            return (delta, dp * dp * w_lo * w_hi);
        }
        let logs: Vec<f64> = self
            .terms
            .iter()
            .map(|term| term.weight.ln() + (term.exponent / 2.0 - 1.0) * lt)
            .collect();
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
        let total: f64 = w.iter().sum();
        let delta = self
            .terms
            .iter()
            .zip(&w)
            .map(|(term, wi)| (term.exponent - 2.0) * wi)
            .sum::<f64>()
            / total;
        let mut pairs = 0.0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                let dp = self.terms[i].exponent - self.terms[j].exponent;
                pairs += dp * dp * w[i] * w[j];
            }
        }
        (delta, pairs / (total * total))
    }

    fn flux(&self, w: f64) -> f64 {
        let aw = w.abs();
        self.terms.iter().map(|term| term.weight * aw.powf(term.exponent - 2.0)).sum::<f64>() * w
    }
}

fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// The diffusion coefficient `phi(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiSpec {
    /// `phi = 1`, the Laplacian.
    ConstantOne,
    /// `phi = t^{p/2-1}`, the p-Laplacian.
    PowerLaw { p: f64 },
    /// `phi = sum a_i t^{p_i/2-1}`, the weighted (p_1, ..., p_r)-Laplacian.
    SumOfPowers(PowerSum),
    /// `phi = e^{t/2}`.
    Exponential,
    /// `phi = (1+t)^{-1/2}`, the prescribed mean curvature operator.
    MeanCurvature,
}

impl PhiSpec {
    pub fn power_law(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::InvalidSpec(format!("power-law exponent {p} must exceed 1")));
        }
        Ok(PhiSpec::PowerLaw { p })
    }

    /// Two-term `(p,q)`-Laplacian with unit weights.
    pub fn pq(p: f64, q: f64) -> Result<Self> {
        Ok(PhiSpec::SumOfPowers(PowerSum::unit_weights(&[p, q])?))
    }

    pub fn sum_of_powers(terms: Vec<PowerTerm>) -> Result<Self> {
        Ok(PhiSpec::SumOfPowers(PowerSum::normalized(terms)?))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PhiSpec::PowerLaw { p } => Self::power_law(*p).map(|_| ()),
            PhiSpec::SumOfPowers(sum) => PowerSum::new(sum.terms.clone()).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Smallest and largest power exponent, for the power-type families.
    pub fn exponent_range(&self) -> Option<(f64, f64)> {
        match self {
            PhiSpec::ConstantOne => Some((2.0, 2.0)),
            PhiSpec::PowerLaw { p } => Some((*p, *p)),
            PhiSpec::SumOfPowers(sum) => Some((sum.p_min(), sum.p_max())),
            _ => None,
        }
    }

    fn single_term(&self) -> Option<PowerTerm> {
        match self {
            PhiSpec::ConstantOne => Some(PowerTerm { weight: 1.0, exponent: 2.0 }),
            PhiSpec::PowerLaw { p } => Some(PowerTerm { weight: 1.0, exponent: *p }),
            PhiSpec::SumOfPowers(sum) if sum.terms.len() == 1 => Some(sum.terms[0]),
            _ => None,
        }
    }

    /// `(delta(t), 2 t delta'(t))` at `t = exp(lt)`.
    pub fn degree_ln(&self, lt: f64) -> (f64, f64) {
        match self {
            PhiSpec::ConstantOne => (0.0, 0.0),
            PhiSpec::PowerLaw { p } => (p - 2.0, 0.0),
            PhiSpec::SumOfPowers(sum) => sum.degree_ln(lt),
            PhiSpec::Exponential => {
                let t = lt.exp();
                (t, 2.0 * t)
            }
            PhiSpec::MeanCurvature => {
                // t/(1+t) = logistic(lt)
                let s = logistic(lt);
                let c = logistic(-lt);
                (-s, -2.0 * s * c)
            }
        }
    }

    pub fn degree_at(&self, t: f64) -> (f64, f64) {
        self.degree_ln(t.ln())
    }
}

impl fmt::Display for PhiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiSpec::ConstantOne => f.write_str("constant_one"),
            PhiSpec::PowerLaw { p } => write!(f, "power_law(p={p})"),
            PhiSpec::SumOfPowers(sum) => {
                f.write_str("sum_of_powers(")?;
                for (i, term) in sum.terms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{}*t^({}/2-1)", term.weight, term.exponent)?;
                }
                f.write_str(")")
            }
            PhiSpec::Exponential => f.write_str("exponential"),
            PhiSpec::MeanCurvature => f.write_str("mean_curvature"),
        }
    }
}

/// Rational number `num/den` with odd numerator and odd positive denominator,
/// so that `x^(num/den)` is a real, sign-preserving power on all of R.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OddRational {
    num: i64,
    den: i64,
}

impl OddRational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den <= 0 || num % 2 == 0 || den % 2 == 0 {
            return Err(Error::InvalidSpec(format!(
                "log-power exponent {num}/{den} must have odd numerator and odd positive denominator"
            )));
        }
        Ok(Self { num, den })
    }

    pub fn integer(num: i64) -> Result<Self> {
        Self::new(num, 1)
    }

    pub fn num(self) -> i64 {
        self.num
    }

    pub fn den(self) -> i64 {
        self.den
    }

    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `sign(x) |x|^(num/den)`.
    pub fn pow(self, x: f64) -> f64 {
        x.signum() * x.abs().powf(self.value())
    }
}

impl fmt::Display for OddRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// The reaction coefficient `psi(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PsiSpec {
    Zero,
    /// `a t^{(q-1)/2}`
    Power { a: f64, q: f64 },
    /// `t^{(m-1)/2} - t^{(k-1)/2}` with `m < k`.
    DoublePower { m: f64, k: f64 },
    /// `a t^{(q-1)/2} (log(t)/2)^m` with `a m < 0`.
    LogPower { a: f64, q: f64, m: OddRational },
    /// `A t^p + B t^q + C t log t + D`. Handled by sampling only.
    GeneralSum { a: f64, p: f64, b: f64, q: f64, c: f64, d: f64 },
}

/// Value of a degree function that may sit on a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaValue {
    Value(f64),
    /// `psi` vanishes (or blows up) here; the one-sided limits from below and
    /// from above.
    Pole { below: ExtReal, above: ExtReal },
    /// `psi` is identically zero.
    Undefined,
}

impl DeltaValue {
    pub fn finite(self, t: f64) -> Result<f64> {
        match self {
            DeltaValue::Value(v) => Ok(v),
            DeltaValue::Pole { .. } => Err(Error::Pole { t }),
            DeltaValue::Undefined => Err(Error::Undefined),
        }
    }
}

impl PsiSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            PsiSpec::Zero => Ok(()),
            PsiSpec::Power { a, q } => {
                if !finite(&[a, q]) || a == 0.0 {
                    return Err(Error::InvalidSpec("power reaction needs finite a != 0 and finite q".into()));
                }
                Ok(())
            }
            PsiSpec::DoublePower { m, k } => {
                if !finite(&[m, k]) || m >= k {
                    return Err(Error::InvalidSpec(format!("double power needs m < k (got m={m}, k={k})")));
                }
                Ok(())
            }
            PsiSpec::LogPower { a, q, m } => {
                OddRational::new(m.num, m.den)?;
                if !finite(&[a, q]) || a == 0.0 || a * m.value() >= 0.0 {
                    return Err(Error::InvalidSpec("log power needs a * m < 0".into()));
                }
                Ok(())
            }
            PsiSpec::GeneralSum { a, p, b, q, c, d } => {
                if !finite(&[a, p, b, q, c, d]) {
                    return Err(Error::InvalidSpec("general sum coefficients must be finite".into()));
                }
                Ok(())
            }
        }
    }

    /// Points where `psi` vanishes or is singular and its degree changes
    /// branch. Only the closed-form families report them.
    pub fn branch_points(&self) -> &'static [f64] {
        match self {
            PsiSpec::DoublePower { .. } | PsiSpec::LogPower { .. } => &[1.0],
            _ => &[],
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self, PsiSpec::GeneralSum { .. })
    }
}

impl fmt::Display for PsiSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsiSpec::Zero => f.write_str("zero"),
            PsiSpec::Power { a, q } => write!(f, "power(a={a}, q={q})"),
            PsiSpec::DoublePower { m, k } => write!(f, "double_power(m={m}, k={k})"),
            PsiSpec::LogPower { a, q, m } => write!(f, "log_power(a={a}, q={q}, m={m})"),
            PsiSpec::GeneralSum { a, p, b, q, c, d } => {
                write!(f, "general_sum({a}*t^{p} + {b}*t^{q} + {c}*t*log t + {d})")
            }
        }
    }
}

pub fn eval_phi(phi: &PhiSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain { what: "phi needs t >= 0", t });
    }
    let value = match phi {
        PhiSpec::ConstantOne => 1.0,
        PhiSpec::PowerLaw { p } => t.powf(p / 2.0 - 1.0),
        PhiSpec::SumOfPowers(sum) => sum.phi(t),
        PhiSpec::Exponential => (t / 2.0).exp(),
        PhiSpec::MeanCurvature => 1.0 / (1.0 + t).sqrt(),
    };
    if !value.is_finite() {
        return Err(Error::Domain { what: "phi is not finite", t });
    }
    Ok(value)
}

pub fn eval_delta_phi(phi: &PhiSpec, t: f64) -> f64 {
    debug_assert!(t > 0.0);
    phi.degree_at(t).0
}

pub fn eval_two_t_delta_phi_prime(phi: &PhiSpec, t: f64) -> f64 {
    debug_assert!(t > 0.0);
    phi.degree_at(t).1
}

pub fn eval_psi(psi: &PsiSpec, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain { what: "psi needs t > 0", t });
    }
    let value = match *psi {
        PsiSpec::Zero => 0.0,
        PsiSpec::Power { a, q } => a * t.powf((q - 1.0) / 2.0),
        PsiSpec::DoublePower { m, k } => {
            if t == 1.0 {
                0.0
            } else {
                t.powf((m - 1.0) / 2.0) - t.powf((k - 1.0) / 2.0)
            }
        }
        PsiSpec::LogPower { a, q, m } => {
            let v = 0.5 * t.ln();
            if v == 0.0 {
                if m.value() < 0.0 {
                    return Err(Error::Pole { t });
                }
                0.0
            } else {
                a * t.powf((q - 1.0) / 2.0) * m.pow(v)
            }
        }
        PsiSpec::GeneralSum { a, p, b, q, c, d } => a * t.powf(p) + b * t.powf(q) + c * t * t.ln() + d,
    };
    Ok(value)
}

/// `psi(t)` at `t = 0`, where it is finite.
pub fn eval_psi_at_zero(psi: &PsiSpec) -> Option<f64> {
    match *psi {
        PsiSpec::Zero => Some(0.0),
        PsiSpec::Power { a, q } => {
            let v = a * 0f64.powf((q - 1.0) / 2.0);
            v.is_finite().then_some(v)
        }
        PsiSpec::DoublePower { m, k } => {
            let v = 0f64.powf((m - 1.0) / 2.0) - 0f64.powf((k - 1.0) / 2.0);
            v.is_finite().then_some(v)
        }
        PsiSpec::LogPower { .. } => None,
        PsiSpec::GeneralSum { a, p, b, q, d, .. } => {
            let v = a * 0f64.powf(p) + b * 0f64.powf(q) + d;
            v.is_finite().then_some(v)
        }
    }
}

pub fn eval_delta_psi(psi: &PsiSpec, t: f64) -> Result<DeltaValue> {
    if !(t > 0.0) {
        return Err(Error::Domain { what: "degree of psi needs t > 0", t });
    }
    let zero_pole = DeltaValue::Pole { below: ExtReal::NegInf, above: ExtReal::PosInf };
    let value = match *psi {
        PsiSpec::Zero => DeltaValue::Undefined,
        PsiSpec::Power { q, .. } => DeltaValue::Value(q - 1.0),
        PsiSpec::DoublePower { m, k } => {
            if t == 1.0 {
                zero_pole
            } else {
                DeltaValue::Value(double_power_degree(m, k, t.ln()))
            }
        }
        PsiSpec::LogPower { q, m, .. } => {
            if t == 1.0 {
                if m.value() > 0.0 {
                    zero_pole
                } else {
                    DeltaValue::Pole { below: ExtReal::PosInf, above: ExtReal::NegInf }
                }
            } else {
                DeltaValue::Value(q - 1.0 + 2.0 * m.value() / t.ln())
            }
        }
        PsiSpec::GeneralSum { a, p, b, q, c, .. } => {
            let value = eval_psi(psi, t)?;
            let two_t_dpsi = 2.0 * (a * p * t.powf(p) + b * q * t.powf(q) + c * t * (t.ln() + 1.0));
            if value == 0.0 {
                zero_pole
            } else {
                DeltaValue::Value(two_t_dpsi / value)
            }
        }
    };
    Ok(value)
}

/// Degree of the double power at `t = exp(lt)`, `lt != 0`.
///
/// With `X = t^{(k-m)/2}` the degree is `(m-1) - (k-m) X/(1-X)`, and
/// `X/(1-X) = 1/expm1(-(k-m) lt/2)` is accurate on both sides of `t = 1`.
pub(crate) fn double_power_degree(m: f64, k: f64, lt: f64) -> f64 {
    (m - 1.0) - (k - m) / (-(k - m) * 0.5 * lt).exp_m1()
}

/// `G(w) = phi(w^2) w`; odd in `w`.
pub fn flux(phi: &PhiSpec, w: f64) -> f64 {
    if w == 0.0 {
        return 0.0;
    }
    match phi {
        PhiSpec::ConstantOne => w,
        PhiSpec::PowerLaw { p } => w.abs().powf(p - 2.0) * w,
        PhiSpec::SumOfPowers(sum) => sum.flux(w),
        PhiSpec::Exponential => (0.5 * w * w).exp() * w,
        PhiSpec::MeanCurvature => w / (1.0 + w * w).sqrt(),
    }
}

/// Unique `w` with `flux(phi, w) = g`.
///
/// Single power terms are inverted in closed form. Otherwise a bracket is
/// grown from `|g|` by doubling and refined by alternating bisection and
/// secant steps; `G` need not be differentiable at the origin.
pub fn invert_flux(phi: &PhiSpec, g: f64) -> Result<f64> {
    if !g.is_finite() {
        return Err(Error::NonInvertible { g });
    }
    if g == 0.0 {
        return Ok(0.0);
    }
    if let Some(term) = phi.single_term() {
        let w = (g.abs() / term.weight).powf(1.0 / (term.exponent - 1.0));
        return if w.is_finite() { Ok(w.copysign(g)) } else { Err(Error::NonInvertible { g }) };
    }
    if let PhiSpec::MeanCurvature = phi {
        // the flux saturates at 1
        return if g.abs() < 1.0 { Ok(g / ((1.0 - g) * (1.0 + g)).sqrt()) } else { Err(Error::NonInvertible { g }) };
    }
    let target = g.abs();
    let f = |w: f64| flux(phi, w) - target;
    let mut lo = 0.0;
    let mut hi = target;
    let mut f_hi = f(hi);
    let mut doublings = 0;
    while !(f_hi >= 0.0) {
        if !f_hi.is_finite() && !f_hi.is_nan() {
            break;
        }
        lo = hi;
        hi *= 2.0;
        f_hi = f(hi);
        doublings += 1;
        if doublings > 1100 || !hi.is_finite() {
            return Err(Error::NonInvertible { g });
        }
    }
    if f_hi.is_nan() {
        return Err(Error::NonInvertible { g });
    }
    if f_hi == 0.0 {
        return Ok(hi.copysign(g));
    }
    let mut f_lo = f(lo);
    for iter in 0..400 {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let secant = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        let mid = if iter % 2 == 1 && secant > lo && secant < hi && secant.is_finite() {
            secant
        } else {
            0.5 * (lo + hi)
        };
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid.copysign(g));
        }
        if f_mid < 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let w = if f_hi.abs() < f_lo.abs() { hi } else { lo };
    Ok(w.copysign(g))
}
