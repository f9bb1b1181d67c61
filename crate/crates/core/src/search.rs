//! Infimum/supremum search over `t > 0` for functions with known limits at
//! `0+` and `inf`.

use std::fmt;

use crate::ext::ExtReal;

pub const SAMPLES: usize = 100_000;
pub const LN_T_MIN: f64 = -27.631021115928547; // ln 1e-12
pub const LN_T_MAX: f64 = 27.631021115928547;
const REFINED: usize = 8;
const REL_TOL: f64 = 1e-10;

/// Where an extremum is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    At(f64),
    ZeroLimit,
    InfinityLimit,
    /// The function is constant.
    Everywhere,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::At(t) => write!(f, "t={t:.6e}"),
            Witness::ZeroLimit => f.write_str("t->0+"),
            Witness::InfinityLimit => f.write_str("t->inf"),
            Witness::Everywhere => f.write_str("all t"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub value: ExtReal,
    pub witness: Witness,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndpointLimits {
    pub at_zero: ExtReal,
    pub at_infinity: ExtReal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfSup {
    pub inf: Extremum,
    pub sup: Extremum,
}

/// Minimises `f` on `[a, b]` by golden-section search; returns `(x, f(x))`.
pub fn golden_section_minimize(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// [`numeric_inf_sup`] for a function of `ln t`.
pub fn numeric_inf_sup_ln(f: impl Fn(f64) -> f64, limits: EndpointLimits) -> InfSup {
    numeric_inf_sup_window(f, limits, LN_T_MIN, LN_T_MAX)
}

/// Same search over an explicit `ln t` window `[lo, hi]`.
pub fn numeric_inf_sup_window(f: impl Fn(f64) -> f64, limits: EndpointLimits, lo: f64, hi: f64) -> InfSup {
    let step = (hi - lo) / (SAMPLES - 1) as f64;
    let xs: Vec<f64> = (0..SAMPLES).map(|i| lo + step * i as f64).collect();
    let vs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();

    let constant = vs.iter().all(|&v| v == vs[0])
        && limits.at_zero == ExtReal::Finite(vs[0])
        && limits.at_infinity == ExtReal::Finite(vs[0]);
    if constant {
        let e = Extremum { value: ExtReal::Finite(vs[0]), witness: Witness::Everywhere };
        return InfSup { inf: e, sup: e };
    }

    let inf = extremum(&f, &xs, &vs, limits, 1.0);
    let sup = extremum(&f, &xs, &vs, limits, -1.0);
    InfSup { inf, sup }
}

/// Samples `f` on 1e5 log-spaced points of `[1e-12, 1e12]`, refines the best
/// local extrema by golden-section search and compares against the limits.
pub fn numeric_inf_sup(f: impl Fn(f64) -> f64, limits: EndpointLimits) -> InfSup {
    numeric_inf_sup_ln(|x| f(x.exp()), limits)
}

/// Infimum of `sign * f`, reported in the original sign.
fn extremum(f: &impl Fn(f64) -> f64, xs: &[f64], vs: &[f64], limits: EndpointLimits, sign: f64) -> Extremum {
    let g = |v: f64| if v.is_nan() { f64::INFINITY } else { sign * v };
    let n = vs.len();

    let mut best_i = 0;
    for i in 1..n {
        if g(vs[i]) < g(vs[best_i]) {
            best_i = i;
        }
    }
    let mut best_x = xs[best_i];
    let mut best_v = g(vs[best_i]);

    let mut candidates: Vec<usize> = (1..n - 1)
        // a plateau counts once, at its left end
        .filter(|&i| g(vs[i]) < g(vs[i - 1]) && g(vs[i]) <= g(vs[i + 1]) && g(vs[i]).is_finite())
        .collect();
    candidates.sort_by(|&a, &b| g(vs[a]).total_cmp(&g(vs[b])));
    candidates.dedup_by(|a, b| a.abs_diff(*b) <= 1);
    for &i in candidates.iter().take(REFINED) {
        let (x, v) = golden_section_minimize(|x| g(f(x)), xs[i - 1], xs[i + 1], REL_TOL);
        if v < best_v {
            best_v = v;
            best_x = x;
        }
    }

    let to_ext = |v: ExtReal| match v {
        ExtReal::Finite(x) => ExtReal::Finite(sign * x),
        ExtReal::PosInf if sign < 0.0 => ExtReal::NegInf,
        ExtReal::NegInf if sign < 0.0 => ExtReal::PosInf,
        other => other,
    };
    let lz = to_ext(limits.at_zero);
    let li = to_ext(limits.at_infinity);
    let sampled = ExtReal::from_f64(best_v);

    let mut out = Extremum { value: sampled, witness: Witness::At(best_x.exp()) };
    if lz <= out.value {
        out = Extremum { value: lz, witness: Witness::ZeroLimit };
    }
    if li <= out.value && !(li == out.value && out.witness == Witness::ZeroLimit) {
        out = Extremum { value: li, witness: Witness::InfinityLimit };
    }
    out.value = to_ext(out.value);
    out
}
