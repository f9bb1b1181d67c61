//! Coupling between `phi` and `psi`: the set `I_psi` on which the reaction
//! has the helpful sign, the supremum `Theta` of the squared bracket off that
//! set, the reaction condition `Theta < 4 gamma/(n-1)`, and the explicit
//! constants of the iteration scheme.
//!
//! Writing `x = delta_phi(s) + 1` and `y = delta_psi(t) + 1`, the bracket is
//! `c x - y` with `c = (n+1)/(n-1)`, and `x` ranges over `[l+1, d+1]`.

use std::fmt;

use crate::degree::{degree_bounds, DegreeProfile};
use crate::ext::ExtReal;
use crate::families::{double_power_degree, eval_delta_psi, eval_psi, DeltaValue, PhiSpec, PsiSpec};
use crate::intervals::{Interval, IntervalSet};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingMethod {
    ClosedForm,
    Sampled,
}

impl fmt::Display for CouplingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CouplingMethod::ClosedForm => "closed_form",
            CouplingMethod::Sampled => "sampled",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingProfile {
    pub i_psi: IntervalSet,
    pub theta_big: ExtReal,
    pub threshold: f64,
    pub psi2_ok: bool,
    pub margin: ExtReal,
    pub theta_small: ExtReal,
    pub alpha: ExtReal,
    pub method: CouplingMethod,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationConstants {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    /// The iteration exponent must be strictly larger than this.
    pub b_threshold: f64,
}

pub(crate) const SAMPLE_POINTS: usize = 20_001;
const SAMPLE_LN_SPAN: f64 = 27.631021115928547;

fn ratio(n: u32) -> f64 {
    (n as f64 + 1.0) / (n as f64 - 1.0)
}

/// `x` corners `(l+1, d+1)`; requires the degree condition on `phi`.
fn corners(phi: &PhiSpec) -> Result<(f64, f64)> {
    let b = degree_bounds(phi);
    match (b.l, b.d) {
        (ExtReal::Finite(l), ExtReal::Finite(d)) if l > -1.0 => Ok((l + 1.0, d + 1.0)),
        _ => Err(Error::UnsupportedFamily(format!(
            "{phi} violates the degree condition (l = {}, d = {})",
            b.l, b.d
        ))),
    }
}

pub fn bracket_value(phi: &PhiSpec, psi: &PsiSpec, n: u32, s: f64, t: f64) -> Result<f64> {
    let delta_psi = eval_delta_psi(psi, t)?.finite(t)?;
    let delta_phi = if s == 0.0 {
        degree_bounds_at_zero(phi)
    } else {
        crate::families::eval_delta_phi(phi, s)
    };
    let nn = n as f64;
    Ok(((nn + 1.0) * (delta_phi + 1.0) - (nn - 1.0) * (delta_psi + 1.0)) / (nn - 1.0))
}

/// Continuous extension of the degree function to `s = 0`.
fn degree_bounds_at_zero(phi: &PhiSpec) -> f64 {
    match phi {
        PhiSpec::ConstantOne | PhiSpec::Exponential | PhiSpec::MeanCurvature => 0.0,
        PhiSpec::PowerLaw { p } => p - 2.0,
        PhiSpec::SumOfPowers(sum) => sum.p_min() - 2.0,
    }
}

/// An open `t`-interval on which `psi` has constant sign and `y = delta_psi + 1`
/// is monotone, expressed in `ln t`.
#[derive(Debug, Clone, Copy)]
struct Branch {
    lo: f64,
    hi: f64,
    sign: f64,
}

/// Closed-form description of `y(ln t)` for the families with a case analysis.
#[derive(Debug, Clone, Copy)]
enum Shape {
    Constant(f64),
    Double { m: f64, k: f64 },
    Log { q: f64, m: f64 },
}

impl Shape {
    fn of(psi: &PsiSpec) -> Option<Self> {
        match *psi {
            PsiSpec::Power { q, .. } => Some(Shape::Constant(q)),
            PsiSpec::DoublePower { m, k } => Some(Shape::Double { m, k }),
            PsiSpec::LogPower { q, m, .. } => Some(Shape::Log { q, m: m.value() }),
            _ => None,
        }
    }

    fn y(self, lt: f64) -> f64 {
        match self {
            Shape::Constant(q) => q,
            Shape::Double { m, k } => double_power_degree(m, k, lt) + 1.0,
            Shape::Log { q, m } => q + 2.0 * m / lt,
        }
    }

    /// One-sided limit of `y` at `lt` approached from inside `branch`.
    fn limit(self, lt: f64, branch: Branch) -> ExtReal {
        if lt.is_infinite() {
            return ExtReal::Finite(match self {
                Shape::Constant(q) => q,
                Shape::Double { m, k } => {
                    if lt < 0.0 {
                        m
                    } else {
                        k
                    }
                }
                Shape::Log { q, .. } => q,
            });
        }
        if lt == 0.0 {
            let from_above = branch.lo == 0.0;
            return match self {
                Shape::Constant(q) => ExtReal::Finite(q),
                Shape::Double { .. } => {
                    if from_above {
                        ExtReal::PosInf
                    } else {
                        ExtReal::NegInf
                    }
                }
                Shape::Log { m, .. } => {
                    if from_above == (m > 0.0) {
                        ExtReal::PosInf
                    } else {
                        ExtReal::NegInf
                    }
                }
            };
        }
        ExtReal::Finite(self.y(lt))
    }

    /// `ln t` with `y = target`; only called strictly inside the branch range.
    fn inverse(self, target: f64) -> f64 {
        match self {
            Shape::Constant(_) => unreachable!("constant degree has no inverse"),
            Shape::Double { m, k } => -2.0 * ((k - m) / (m - target)).ln_1p() / (k - m),
            Shape::Log { q, m } => 2.0 * m / (target - q),
        }
    }
}

fn branches(psi: &PsiSpec) -> Vec<Branch> {
    let inf = f64::INFINITY;
    match *psi {
        PsiSpec::Power { a, .. } => vec![Branch { lo: -inf, hi: inf, sign: a.signum() }],
        PsiSpec::DoublePower { .. } => vec![
            Branch { lo: -inf, hi: 0.0, sign: 1.0 },
            Branch { lo: 0.0, hi: inf, sign: -1.0 },
        ],
        PsiSpec::LogPower { a, .. } => vec![
            Branch { lo: -inf, hi: 0.0, sign: -a.signum() },
            Branch { lo: 0.0, hi: inf, sign: a.signum() },
        ],
        _ => Vec::new(),
    }
}

/// The part of `branch` where `y <= target` (`below = true`) or `y >= target`.
fn branch_level_set(shape: Shape, branch: Branch, target: f64, below: bool) -> Option<Interval> {
    let y_lo = shape.limit(branch.lo, branch);
    let y_hi = shape.limit(branch.hi, branch);
    let whole = Interval::open(branch.lo.exp(), branch.hi.exp());
    let keep = |y: f64| if below { y <= target } else { y >= target };
    if let Shape::Constant(q) = shape {
        return keep(q).then_some(whole);
    }
    let increasing = y_lo < y_hi;
    let (y_min, y_max) = if increasing { (y_lo, y_hi) } else { (y_hi, y_lo) };
    let t = ExtReal::Finite(target);
    // y stays strictly inside (y_min, y_max) on the open branch
    if (below && t >= y_max) || (!below && t <= y_min) {
        return Some(whole);
    }
    if (below && t <= y_min) || (!below && t >= y_max) {
        return None;
    }
    let cut = shape.inverse(target).exp();
    // the kept part contains the end where y is small (below) or large
    let keep_low_end = below == increasing;
    Some(if keep_low_end {
        Interval::new(whole.lo, cut, false, true)
    } else {
        Interval::new(cut, whole.hi, true, false)
    })
}

/// Sample grid used by the sampled pathway: log-spaced over `[1e-12, 1e12]`.
pub(crate) fn sample_grid() -> Vec<f64> {
    let step = 2.0 * SAMPLE_LN_SPAN / (SAMPLE_POINTS - 1) as f64;
    (0..SAMPLE_POINTS).map(|i| (-SAMPLE_LN_SPAN + step * i as f64).exp()).collect()
}

fn sampled_member(psi: &PsiSpec, t: f64, c: f64, xs: (f64, f64)) -> bool {
    let Ok(value) = eval_psi(psi, t) else { return true };
    if value == 0.0 {
        return true;
    }
    match eval_delta_psi(psi, t) {
        Ok(DeltaValue::Value(dpsi)) => {
            let y = dpsi + 1.0;
            value * (c * xs.0 - y) >= 0.0 && value * (c * xs.1 - y) >= 0.0
        }
        _ => true,
    }
}

pub fn i_psi_method(psi: &PsiSpec) -> CouplingMethod {
    if psi.has_closed_form() {
        CouplingMethod::ClosedForm
    } else {
        CouplingMethod::Sampled
    }
}

pub fn compute_i_psi(phi: &PhiSpec, psi: &PsiSpec, n: u32) -> Result<IntervalSet> {
    let (x_min, x_max) = corners(phi)?;
    let c = ratio(n);
    if let PsiSpec::Zero = psi {
        return Ok(IntervalSet::full());
    }
    if let Some(shape) = Shape::of(psi) {
        let mut parts: Vec<Interval> = psi.branch_points().iter().map(|&t| Interval::point(t)).collect();
        for branch in branches(psi) {
            // psi > 0 needs c x - y >= 0 for every x, i.e. y <= c x_min;
            // psi < 0 needs y >= c x_max.
            let part = if branch.sign > 0.0 {
                branch_level_set(shape, branch, c * x_min, true)
            } else {
                branch_level_set(shape, branch, c * x_max, false)
            };
            parts.extend(part);
        }
        return Ok(IntervalSet::from_intervals(parts));
    }

    let grid = sample_grid();
    let member: Vec<bool> = grid.iter().map(|&t| sampled_member(psi, t, c, (x_min, x_max))).collect();
    let boundary = |i: usize| -> f64 {
        if i == 0 {
            0.0
        } else if i == grid.len() {
            f64::INFINITY
        } else {
            (grid[i - 1] * grid[i]).sqrt()
        }
    };
    let mut parts = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if member[i] {
            let start = i;
            while i < grid.len() && member[i] {
                i += 1;
            }
            parts.push(Interval::closed(boundary(start), boundary(i)));
        } else {
            i += 1;
        }
    }
    Ok(IntervalSet::from_intervals(parts))
}

/// Largest squared bracket over a closed `y`-range and the `x` corners.
fn corner_max(c: f64, xs: (f64, f64), y_lo: ExtReal, y_hi: ExtReal) -> ExtReal {
    match (y_lo, y_hi) {
        (ExtReal::Finite(a), ExtReal::Finite(b)) => {
            let v = [c * xs.0 - a, c * xs.0 - b, c * xs.1 - a, c * xs.1 - b]
                .iter()
                .map(|z| z * z)
                .fold(0.0, f64::max);
            ExtReal::Finite(v)
        }
        _ => ExtReal::PosInf,
    }
}

pub fn compute_theta_big(phi: &PhiSpec, psi: &PsiSpec, n: u32, i_psi: &IntervalSet) -> Result<ExtReal> {
    let xs = corners(phi)?;
    let c = ratio(n);
    let complement = i_psi.complement();
    if complement.is_empty() || matches!(psi, PsiSpec::Zero) {
        return Ok(ExtReal::NegInf);
    }

    let Some(shape) = Shape::of(psi) else {
        let mut best = ExtReal::NegInf;
        for t in sample_grid() {
            if !complement.contains(t) {
                continue;
            }
            if let Ok(DeltaValue::Value(dpsi)) = eval_delta_psi(psi, t) {
                let y = ExtReal::Finite(dpsi + 1.0);
                best = best.max(corner_max(c, xs, y, y));
            }
        }
        return Ok(best);
    };

    let mut best = ExtReal::NegInf;
    for part in complement.intervals() {
        for branch in branches(psi) {
            let (b_lo, b_hi) = (branch.lo.exp(), branch.hi.exp());
            let lo = part.lo.max(b_lo);
            let hi = part.hi.min(b_hi);
            if lo > hi {
                continue;
            }
            if lo == hi {
                // an isolated point of the complement; a pole carries no bracket value
                let inside = lo > b_lo && lo < b_hi && part.contains(lo);
                if inside {
                    let y = ExtReal::Finite(shape.y(lo.ln()));
                    best = best.max(corner_max(c, xs, y, y));
                }
                continue;
            }
            let ya = shape.limit(lo.ln(), branch);
            let yb = shape.limit(hi.ln(), branch);
            let (y_min, y_max) = if ya <= yb { (ya, yb) } else { (yb, ya) };
            best = best.max(corner_max(c, xs, y_min, y_max));
        }
    }
    Ok(best)
}

pub fn check_psi2(theta_big: ExtReal, gamma: f64, n: u32) -> (bool, ExtReal) {
    let threshold = 4.0 * gamma / (n as f64 - 1.0);
    let margin = match theta_big {
        ExtReal::NegInf => ExtReal::PosInf,
        ExtReal::PosInf => ExtReal::NegInf,
        ExtReal::Finite(theta) => ExtReal::Finite(threshold - theta),
    };
    (margin > ExtReal::Finite(0.0), margin)
}

pub fn theta_alpha(gamma: f64, theta_big: ExtReal, d: f64, n: u32) -> (ExtReal, ExtReal) {
    match theta_big {
        ExtReal::NegInf => (ExtReal::Finite(gamma), ExtReal::Finite(0.0)),
        ExtReal::PosInf => (ExtReal::NegInf, ExtReal::PosInf),
        ExtReal::Finite(theta_big) => {
            let theta = gamma - theta_big * (n as f64 - 1.0) / 4.0;
            (ExtReal::Finite(theta), ExtReal::Finite(theta_big * (d + 1.0) / (4.0 * theta)))
        }
    }
}

pub fn iteration_constants(profile: &DegreeProfile) -> Result<IterationConstants> {
    if !profile.phi1_ok || !profile.phi2_ok {
        return Err(Error::Precondition("iteration constants need both degree conditions".into()));
    }
    let l = profile.l.to_f64();
    let d = profile.d.to_f64();
    let gamma = profile.gamma.to_f64();
    let big_gamma = profile.big_gamma.to_f64();
    let top = 1f64.max(l.abs()).max(d.abs());
    let a0 = big_gamma + (d + 1.0).powi(2) + 2.0 * (d + 1.0);
    let a1 = (1.0 + l).min(1.0);
    let a2 = 4.0 * top;
    let a3 = l.abs().max(d.abs()) * top;
    let b_threshold = (2.0 * (a0 + a3).powi(2) / (a1 * gamma)).max(d).max(1.0);
    Ok(IterationConstants { a0, a1, a2, a3, b_threshold })
}

/// `I_psi`, `Theta` and the reaction condition for a degree profile of `phi`.
pub fn coupling_profile(phi: &PhiSpec, psi: &PsiSpec, degree: &DegreeProfile) -> Result<CouplingProfile> {
    let n = degree.n;
    let i_psi = compute_i_psi(phi, psi, n)?;
    let theta_big = compute_theta_big(phi, psi, n, &i_psi)?;
    let gamma = degree.gamma.to_f64();
    let (psi2_ok, margin) = check_psi2(theta_big, gamma, n);
    let (theta_small, alpha) = theta_alpha(gamma, theta_big, degree.d.to_f64(), n);
    Ok(CouplingProfile {
        i_psi,
        theta_big,
        threshold: 4.0 * gamma / (n as f64 - 1.0),
        psi2_ok,
        margin,
        theta_small,
        alpha,
        method: i_psi_method(psi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::profile;
    use crate::families::OddRational;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn pq(p: f64, q: f64) -> PhiSpec {
        PhiSpec::pq(p, q).unwrap()
    }

    #[test]
    fn bracket_examples() {
        for n in 2..8u32 {
            let q = 2.7;
            let v = bracket_value(&PhiSpec::ConstantOne, &PsiSpec::Power { a: 1.0, q }, n, 0.4, 3.0).unwrap();
            let nn = n as f64;
            assert_relative_eq!(v, (2.0 - (nn - 1.0) * (q - 1.0)) / (nn - 1.0), epsilon = 1e-14);
            let q0 = (nn + 1.0) / (nn - 1.0);
            let z = bracket_value(&PhiSpec::ConstantOne, &PsiSpec::Power { a: 1.0, q: q0 }, n, 2.0, 0.3).unwrap();
            assert!(z.abs() < 1e-14);
        }
        let err = bracket_value(&PhiSpec::ConstantOne, &PsiSpec::DoublePower { m: 1.0, k: 3.0 }, 3, 1.0, 1.0);
        assert_eq!(err, Err(Error::Pole { t: 1.0 }));
    }

    #[test]
    fn bracket_is_monotone_in_both_degrees() {
        let phi = pq(1.5, 3.5);
        let psi = PsiSpec::DoublePower { m: 0.5, k: 4.0 };
        let mut rng = 12345u64;
        let mut next = || {
            rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((rng >> 11) as f64 / (1u64 << 53) as f64) * 8.0 - 4.0
        };
        for _ in 0..1000 {
            let (s1, s2) = (10f64.powf(next()), 10f64.powf(next()));
            let t = 10f64.powf(next());
            if t == 1.0 {
                continue;
            }
            let b1 = bracket_value(&phi, &psi, 3, s1, t).unwrap();
            let b2 = bracket_value(&phi, &psi, 3, s2, t).unwrap();
            let (d1, d2) = (crate::families::eval_delta_phi(&phi, s1), crate::families::eval_delta_phi(&phi, s2));
            assert!((b1 - b2) * (d1 - d2) >= 0.0);
        }
    }

    #[test]
    fn i_psi_examples() {
        let ac = compute_i_psi(&PhiSpec::ConstantOne, &PsiSpec::DoublePower { m: 1.0, k: 3.0 }, 3).unwrap();
        assert!(ac.is_full(), "{ac}");
        let none = compute_i_psi(&PhiSpec::ConstantOne, &PsiSpec::Power { a: 1.0, q: 3.0 }, 3).unwrap();
        assert!(none.is_empty());
        assert!(compute_i_psi(&pq(2.0, 5.0), &PsiSpec::Zero, 4).unwrap().is_full());
        assert!(matches!(
            compute_i_psi(&PhiSpec::Exponential, &PsiSpec::Zero, 3),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn i_psi_double_power_partial() {
        // Laplacian, n = 3: threshold c x = 2 on both sides; m = 2.5 > 2 so near 0 the
        // degree y is close to m and fails; the cut sits where y = 2.
        let psi = PsiSpec::DoublePower { m: 2.5, k: 4.0 };
        let set = compute_i_psi(&PhiSpec::ConstantOne, &psi, 3).unwrap();
        assert_eq!(set.intervals().len(), 1);
        let part = set.intervals()[0];
        assert!(part.lo > 0.0 && part.lo < 1.0 && part.lo_closed);
        assert_eq!(part.hi, f64::INFINITY);
        let DeltaValue::Value(y) = eval_delta_psi(&psi, part.lo).unwrap() else { panic!() };
        assert_relative_eq!(y + 1.0, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn i_psi_log_power() {
        let m = OddRational::integer(1).unwrap();
        // a < 0, m > 0: psi > 0 on (0,1), < 0 on (1, inf)
        let psi = PsiSpec::LogPower { a: -1.0, q: 2.0, m };
        let set = compute_i_psi(&PhiSpec::ConstantOne, &psi, 3).unwrap();
        // on (0,1): y = 2 + 2/ln t <= 2 always; on (1, inf): y >= 2 always
        assert!(set.is_full(), "{set}");
        let psi = PsiSpec::LogPower { a: -1.0, q: 4.0, m };
        let set = compute_i_psi(&PhiSpec::ConstantOne, &psi, 3).unwrap();
        // on (0,1) y = 4 + 2/ln t <= 2 iff ln t >= -1
        assert_eq!(set.intervals()[0].lo, (-1f64).exp());
        assert!(set.contains(5.0));
    }

    #[test]
    fn theta_examples() {
        let phi = PhiSpec::ConstantOne;
        let psi = PsiSpec::Power { a: 1.0, q: 2.5 };
        let i_psi = compute_i_psi(&phi, &psi, 3).unwrap();
        assert!(i_psi.is_empty());
        assert_eq!(compute_theta_big(&phi, &psi, 3, &i_psi).unwrap(), ExtReal::Finite(0.25));
        assert_eq!(compute_theta_big(&phi, &psi, 3, &IntervalSet::full()).unwrap(), ExtReal::NegInf);

        // (2,3)-Laplacian with a < 0, q = 4: x in [1, 2], y = 4; corners 2*1-4 and 2*2-4
        let phi = pq(2.0, 3.0);
        let psi = PsiSpec::Power { a: -1.0, q: 4.0 };
        assert!(compute_i_psi(&phi, &psi, 3).unwrap().is_full());
        assert_eq!(compute_theta_big(&phi, &psi, 3, &IntervalSet::empty()).unwrap(), ExtReal::Finite(4.0));
    }

    #[test]
    fn theta_is_infinite_at_accumulating_pole() {
        // complement (0.5, 2) straddles the zero of psi at 1
        let set = IntervalSet::from_intervals([
            Interval::new(0.0, 0.5, false, true),
            Interval::new(2.0, f64::INFINITY, true, false),
        ]);
        let th = compute_theta_big(&PhiSpec::ConstantOne, &PsiSpec::DoublePower { m: 1.0, k: 3.0 }, 3, &set).unwrap();
        assert_eq!(th, ExtReal::PosInf);
        // a lone excluded point at the pole carries no value
        let set = IntervalSet::full().intersection(&IntervalSet::from_intervals([Interval::point(1.0)]).complement());
        let th = compute_theta_big(&PhiSpec::ConstantOne, &PsiSpec::DoublePower { m: 1.0, k: 3.0 }, 3, &set).unwrap();
        assert_eq!(th, ExtReal::NegInf);
    }

    #[test]
    fn psi2_and_theta_alpha_examples() {
        assert_eq!(check_psi2(ExtReal::NegInf, 0.5, 3), (true, ExtReal::PosInf));
        assert_eq!(check_psi2(ExtReal::Finite(0.25), 0.5, 3), (true, ExtReal::Finite(0.75)));
        assert_eq!(check_psi2(ExtReal::Finite(1.0), 0.5, 3), (false, ExtReal::Finite(0.0)));

        let (theta, alpha) = theta_alpha(0.5, ExtReal::Finite(0.25), 0.0, 3);
        assert_relative_eq!(theta.finite().unwrap(), 0.375);
        assert_relative_eq!(alpha.finite().unwrap(), 1.0 / 6.0);
        assert_eq!(theta_alpha(0.5, ExtReal::NegInf, 0.0, 3), (ExtReal::Finite(0.5), ExtReal::Finite(0.0)));
    }

    #[test]
    fn iteration_constant_examples() {
        let c = iteration_constants(&profile(&PhiSpec::ConstantOne, 3)).unwrap();
        assert_eq!((c.a0, c.a1, c.a2, c.a3), (3.5, 1.0, 4.0, 0.0));
        assert_relative_eq!(c.b_threshold, 49.0, max_relative = 1e-15);
        assert_eq!(iteration_constants(&profile(&PhiSpec::PowerLaw { p: 2.0 }, 3)).unwrap(), c);
        let c = iteration_constants(&profile(&PhiSpec::PowerLaw { p: 1.6 }, 3)).unwrap();
        assert_relative_eq!(c.a1, 0.6, max_relative = 1e-15);
        assert!(iteration_constants(&profile(&PhiSpec::Exponential, 3)).is_err());
    }

    #[test]
    fn general_sum_reduces_to_power_when_single_term() {
        // A t^p with p = (q-1)/2 matches the Power family
        let phi = PhiSpec::ConstantOne;
        for (a, q) in [(1.0, 2.5), (1.0, 1.5), (-1.0, 0.5), (-1.0, 3.0)] {
            let closed = PsiSpec::Power { a, q };
            let sampled = PsiSpec::GeneralSum { a, p: (q - 1.0) / 2.0, b: 0.0, q: 0.0, c: 0.0, d: 0.0 };
            let ci = compute_i_psi(&phi, &closed, 3).unwrap();
            let si = compute_i_psi(&phi, &sampled, 3).unwrap();
            assert_eq!(ci.is_full(), si.is_full());
            assert_eq!(ci.is_empty(), si.is_empty());
            let ct = compute_theta_big(&phi, &closed, 3, &ci).unwrap();
            let st = compute_theta_big(&phi, &sampled, 3, &si).unwrap();
            match (ct, st) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => assert!((a - b).abs() <= 1e-4 * a.max(1.0)),
                (a, b) => assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn full_i_psi_means_psi2_holds() {
        let phi = pq(2.0, 3.0);
        let degree = profile(&phi, 2);
        let c = coupling_profile(&phi, &PsiSpec::Zero, &degree).unwrap();
        assert!(c.i_psi.is_full());
        assert_eq!(c.theta_big, ExtReal::NegInf);
        assert!(c.psi2_ok);
    }

    proptest! {
        #[test]
        fn enlarging_i_psi_never_increases_theta(m in -2.0f64..3.0, dk in 0.1f64..4.0, cut in 0.05f64..20.0, n in 2u32..7) {
            let phi = pq(1.8, 2.6);
            let psi = PsiSpec::DoublePower { m, k: m + dk };
            let base = compute_i_psi(&phi, &psi, n).unwrap();
            let bigger = base.union(&IntervalSet::from_intervals([Interval::closed(cut, cut * 1.7)]));
            let t0 = compute_theta_big(&phi, &psi, n, &base).unwrap();
            let t1 = compute_theta_big(&phi, &psi, n, &bigger).unwrap();
            prop_assert!(t1 <= t0);
        }

        #[test]
        fn theta_small_positive_when_psi2_holds(p in 1.2f64..4.0, q in -1.0f64..8.0, a_pos in any::<bool>(), n in 2u32..8) {
            let phi = PhiSpec::PowerLaw { p };
            let psi = PsiSpec::Power { a: if a_pos { 1.0 } else { -1.0 }, q };
            let degree = profile(&phi, n);
            let c = coupling_profile(&phi, &psi, &degree).unwrap();
            if c.psi2_ok {
                prop_assert!(c.theta_small > ExtReal::Finite(0.0));
            }
        }

        #[test]
        fn p_laplacian_power_reaction_matches_table(p in 1.1f64..5.0, q in -1.0f64..12.0, n in 2u32..10) {
            let nn = n as f64;
            let phi = PhiSpec::PowerLaw { p };
            let degree = profile(&phi, n);
            for a in [1.0, -1.0] {
                let psi = PsiSpec::Power { a, q };
                let c = coupling_profile(&phi, &psi, &degree).unwrap();
                prop_assume!(c.margin.finite().map_or(true, |m| m.abs() > 1e-10));
                let expected = if a > 0.0 { q < (nn + 3.0) / (nn - 1.0) * (p - 1.0) } else { q > p - 1.0 };
                prop_assert_eq!(c.psi2_ok, expected, "a={} margin={}", a, c.margin);
            }
        }
    }
}
