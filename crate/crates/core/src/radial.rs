//! Radially symmetric positive solutions on model spaces, and the empirical
//! gradient-estimate and Harnack quantities measured on them.
//!
//! With warp `s(r)` and flux `F = s^{n-1} G(u')`, `G(w) = phi(w^2) w`, the
//! equation becomes the first-order system
//!
//! ```text
//! F' = -s^{n-1} psi(u^2) u,    u' = G^{-1}(F / s^{n-1}).
//! ```

use rayon::prelude::*;

use crate::degree::degree_bounds;
use crate::ext::ExtReal;
use crate::families::{eval_psi, eval_psi_at_zero, invert_flux, PhiSpec, PsiSpec};
use crate::{Error, Result};

/// Below this radius the integrator takes sub-steps proportional to `r`.
const GRADED_RADIUS: f64 = 0.25;
const REJECT_RESIDUAL: f64 = 1e-6;

// Gauss-Legendre nodes and weights on [-1, 1]
const GL3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
    (0.0, 0.888_888_888_888_888_9),
    (0.774_596_669_241_483_4, 0.555_555_555_555_555_6),
];
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_2, 0.101_228_536_290_376_26),
];

fn gauss(rule: &[(f64, f64)], a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    half * rule.iter().map(|&(x, w)| w * f(mid + half * x)).sum::<f64>()
}

/// Rotationally symmetric comparison space with constant sectional curvature
/// `-k`: Euclidean space for `k = 0`, hyperbolic space otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpace {
    pub n: u32,
    pub k: f64,
}

impl ModelSpace {
    pub fn new(n: u32, k: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSpec(format!("dimension {n} must be at least 2")));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidSpec(format!("curvature magnitude {k} must be nonnegative")));
        }
        Ok(Self { n, k })
    }

    pub fn euclidean(n: u32) -> Self {
        Self { n, k: 0.0 }
    }

    /// `K` in `Ric >= -K`.
    pub fn ricci_bound(&self) -> f64 {
        (self.n as f64 - 1.0) * self.k
    }

    pub fn warp(&self, r: f64) -> f64 {
        if self.k == 0.0 {
            r
        } else {
            let sk = self.k.sqrt();
            (sk * r).sinh() / sk
        }
    }

    /// `s(r)^{n-1}`, the area density of geodesic spheres.
    fn area(&self, r: f64) -> f64 {
        self.warp(r).powi(self.n as i32 - 1)
    }

    /// `1 + sqrt(K) R`.
    pub fn scale(&self, radius: f64) -> f64 {
        1.0 + self.ricci_bound().sqrt() * radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub positive_ok: bool,
    /// `sup |u'|/u` over `[0, R]`.
    pub sup_ratio: f64,
    /// `sup_ratio R / (1 + sqrt(K) R)`.
    pub c_hat: f64,
    /// `log(max u / min u) / (1 + sqrt(K) R)` over `[0, R]`.
    pub harnack_log: f64,
    /// Largest defect in the integrated flux identity, relative to `max |F|`.
    pub residual_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialSolution {
    pub radius: f64,
    /// Nodes `0 = r_0 < ... < r_N = 2R`; shorter when integration halted.
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    /// `G(u')` at each node.
    pub flux: Vec<f64>,
    /// `(u'/u)^2` at each node.
    pub h_hat: Vec<f64>,
    /// Radius where integration stopped early, if it did.
    pub halted_at: Option<f64>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateDiagnostics {
    pub c_hat: f64,
    pub harnack_log: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub radius: f64,
    pub c_hat: f64,
    pub harnack_log: f64,
    pub positive_ok: bool,
    pub residual_max: f64,
}

struct System<'a> {
    phi: &'a PhiSpec,
    psi: &'a PsiSpec,
    space: ModelSpace,
}

impl System<'_> {
    fn psi_u(&self, u: f64) -> f64 {
        let t = u * u;
        let value = if t == 0.0 { eval_psi_at_zero(self.psi) } else { eval_psi(self.psi, t).ok() };
        value.map_or(f64::NAN, |v| v * u)
    }

    fn slope(&self, r: f64, flux: f64) -> f64 {
        invert_flux(self.phi, flux / self.space.area(r)).unwrap_or(f64::NAN)
    }

    /// `(u', F')`.
    fn rhs(&self, r: f64, u: f64, flux: f64) -> (f64, f64) {
        (self.slope(r, flux), -self.space.area(r) * self.psi_u(u))
    }

    fn rk4(&self, r: f64, u: f64, f: f64, h: f64) -> (f64, f64) {
        let k1 = self.rhs(r, u, f);
        let k2 = self.rhs(r + 0.5 * h, u + 0.5 * h * k1.0, f + 0.5 * h * k1.1);
        let k3 = self.rhs(r + 0.5 * h, u + 0.5 * h * k2.0, f + 0.5 * h * k2.1);
        let k4 = self.rhs(r + h, u + h * k3.0, f + h * k3.1);
        (
            u + h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
            f + h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
        )
    }

    /// `(u, F)` at a small radius `eps` from the leading terms of the series
    /// about the centre, where `psi(u^2) u` is frozen at its central value.
    fn start(&self, u0: f64, eps: f64) -> (f64, f64) {
        let source = self.psi_u(u0);
        let volume = |rho: f64| gauss(&GL8, 0.0, rho, |x| self.space.area(x));
        let flux = -source * volume(eps);
        let u = u0
            + gauss(&GL8, 0.0, eps, |rho| {
                let g = -source * volume(rho) / self.space.area(rho);
                invert_flux(self.phi, g).unwrap_or(f64::NAN)
            });
        (u, flux)
    }
}

/// Integrates from the centre with `u(0) = u0`, `u'(0) = 0` out to `2R`.
///
/// Output nodes are uniform with spacing close to `h` and include `R`. Below
/// radius 0.25 each interval is crossed with sub-steps proportional to `r`,
/// which keeps fourth-order accuracy despite the singular point at the
/// origin.
pub fn solve_radial(phi: &PhiSpec, psi: &PsiSpec, space: ModelSpace, u0: f64, radius: f64, h: f64) -> Result<RadialSolution> {
    let b = degree_bounds(phi);
    if !(b.l > ExtReal::Finite(-1.0) && b.d.is_finite()) {
        return Err(Error::UnsupportedFamily(format!("{phi} violates the degree condition; the flux is not invertible")));
    }
    if !(u0 > 0.0 && u0.is_finite()) {
        return Err(Error::Precondition(format!("central value {u0} must be positive")));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::Precondition(format!("radius {radius} must be positive")));
    }
    if !(h > 0.0 && h <= radius / 100.0) {
        return Err(Error::Precondition(format!("step {h} must lie in (0, R/100]")));
    }
    phi.validate()?;
    psi.validate()?;

    let sys = System { phi, psi, space };
    let half = (radius / h).ceil() as usize;
    let nodes = 2 * half;
    let hh = 2.0 * radius / nodes as f64;
    let node = |j: usize| if j == half { radius } else if j == nodes { 2.0 * radius } else { j as f64 * hh };

    let mut grid = vec![0.0];
    let mut u = vec![u0];
    let mut du = vec![0.0];
    let mut flux = vec![0.0];
    let mut halted_at = None;

    let mut r = hh / 10.0;
    let (mut uc, mut fc) = sys.start(u0, r);
    for j in 1..=nodes {
        let target = node(j);
        while r < target {
            let step = if r < GRADED_RADIUS { (hh * r / GRADED_RADIUS).min(target - r) } else { target - r };
            let step = if target - r - step < 1e-12 * hh { target - r } else { step };
            (uc, fc) = sys.rk4(r, uc, fc, step);
            r += step;
        }
        r = target;
        let slope = sys.slope(r, fc);
        if !(uc > 0.0) || !uc.is_finite() || !fc.is_finite() || !slope.is_finite() {
            halted_at = Some(r);
            break;
        }
        grid.push(r);
        u.push(uc);
        du.push(slope);
        flux.push(crate::families::flux(phi, slope));
    }

    let residual_max = flux_residual(&sys, &grid, &u, &du, &flux);
    if residual_max > REJECT_RESIDUAL {
        return Err(Error::StepRejected { residual: residual_max });
    }
    let h_hat = u.iter().zip(&du).map(|(u, d)| (d / u).powi(2)).collect();
    let mut sol = RadialSolution {
        radius,
        grid,
        u,
        du,
        flux,
        h_hat,
        halted_at,
        diagnostics: Diagnostics {
            positive_ok: halted_at.is_none(),
            sup_ratio: 0.0,
            c_hat: 0.0,
            harnack_log: 0.0,
            residual_max,
        },
    };
    let (sup_ratio, c_hat, harnack_log) = measure(&sol, space, radius);
    sol.diagnostics.sup_ratio = sup_ratio;
    sol.diagnostics.c_hat = c_hat;
    sol.diagnostics.harnack_log = harnack_log;
    Ok(sol)
}

/// Relative defect of `s^{n-1} G(u') = -int_0^r s^{n-1} psi(u^2) u`, with the
/// integral taken over cubic Hermite interpolants of `u`.
fn flux_residual(sys: &System, grid: &[f64], u: &[f64], du: &[f64], flux: &[f64]) -> f64 {
    let mut integral = 0.0;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for j in 1..grid.len() {
        let (a, b) = (grid[j - 1], grid[j]);
        let len = b - a;
        let hermite = |r: f64| {
            let x = (r - a) / len;
            let (x2, x3) = (x * x, x * x * x);
            (2.0 * x3 - 3.0 * x2 + 1.0) * u[j - 1]
                + (x3 - 2.0 * x2 + x) * len * du[j - 1]
                + (-2.0 * x3 + 3.0 * x2) * u[j]
                + (x3 - x2) * len * du[j]
        };
        integral += gauss(&GL3, a, b, |r| sys.space.area(r) * sys.psi_u(hermite(r)));
        let big_f = sys.space.area(b) * flux[j];
        worst = worst.max((big_f + integral).abs());
        scale = scale.max(big_f.abs());
    }
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// `(sup |u'|/u, c_hat, harnack_log)` over the nodes in `[0, R]`.
fn measure(sol: &RadialSolution, space: ModelSpace, radius: f64) -> (f64, f64, f64) {
    let mut sup_ratio: f64 = 0.0;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for ((r, u), du) in sol.grid.iter().zip(&sol.u).zip(&sol.du) {
        if *r > radius {
            break;
        }
        sup_ratio = sup_ratio.max(du.abs() / u);
        lo = lo.min(*u);
        hi = hi.max(*u);
    }
    let scale = space.scale(radius);
    (sup_ratio, sup_ratio * radius / scale, (hi / lo).ln() / scale)
}

/// The empirical constants on `B(R)`, for a solution positive on `B(2R)`.
pub fn verify_estimate(sol: &RadialSolution, space: ModelSpace, radius: f64) -> Result<EstimateDiagnostics> {
    let reaches = sol.grid.last().is_some_and(|&r| r >= 2.0 * radius * (1.0 - 1e-12));
    if !sol.diagnostics.positive_ok || !reaches {
        return Err(Error::Precondition("solution is not positive on the doubled ball".into()));
    }
    let (_, c_hat, harnack_log) = measure(sol, space, radius);
    Ok(EstimateDiagnostics { c_hat, harnack_log })
}

/// One solve per radius on `B(2R)`, in parallel; rows keep input order.
pub fn sweep_radii(phi: &PhiSpec, psi: &PsiSpec, space: ModelSpace, u0: f64, radii: &[f64], h: f64) -> Result<Vec<SweepRow>> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Precondition("radii must be increasing".into()));
    }
    radii
        .par_iter()
        .map(|&radius| {
            let sol = solve_radial(phi, psi, space, u0, radius, h)?;
            let d = sol.diagnostics;
            Ok(SweepRow {
                radius,
                c_hat: d.c_hat,
                harnack_log: d.harnack_log,
                positive_ok: d.positive_ok,
                residual_max: d.residual_max,
            })
        })
        .collect()
}
