//! Smooth warping profiles.
//!
//! The interpolated profile glues the Euclidean pair `(r, 1)` near the axis to
//! the hyperbolic pair `(sinh r, cosh r)` far from it through a smooth step
//! `rho` built from the normalized integral of a compactly supported bump.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default bump parameter; gives matching radius `2k + 1 = 39`.
pub const DEFAULT_K: f64 = 19.0;
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-12;
/// Slack admitted by grid verification of the profile inequalities.
pub const VERIFY_SLACK: f64 = -1e-10;

const MAX_SIMPSON_DEPTH: u32 = 48;
const KNOT_SPACING: f64 = 1.0 / 16.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BumpSpec {
    pub k: f64,
    pub quadrature_tol: f64,
}

impl BumpSpec {
    pub fn new(k: f64, quadrature_tol: f64) -> Result<Self> {
        if !(k >= 1.0) || !k.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bump parameter k must be >= 1, got {k}"
            )));
        }
        if !(quadrature_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerance must be positive, got {quadrature_tol}"
            )));
        }
        Ok(Self { k, quadrature_tol })
    }

    pub fn with_k(k: f64) -> Result<Self> {
        Self::new(k, DEFAULT_QUADRATURE_TOL)
    }

    /// `exp(-k^2 / (k^2 - x^2))` on `|x| < k`, zero outside.
    pub fn f(&self, x: f64) -> f64 {
        let k2 = self.k * self.k;
        let gap = k2 - x * x;
        if gap <= 0.0 {
            return 0.0;
        }
        (-k2 / gap).exp()
    }

    pub fn f_prime(&self, x: f64) -> f64 {
        let k2 = self.k * self.k;
        let gap = k2 - x * x;
        if gap <= 0.0 {
            return 0.0;
        }
        -2.0 * k2 * x / (gap * gap) * (-k2 / gap).exp()
    }
}

pub fn bump_f(spec: &BumpSpec, x: f64) -> f64 {
    spec.f(x)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_SIMPSON_DEPTH)
        .ok_or(Error::QuadratureNonconvergence { a, b, tol })
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 || m <= a || m >= b {
        return None;
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Some(l + r)
}

/// The running integral `F_k(x)` of the bump, with the total `F_k(k)`
/// computed once and cached.
pub struct Bump {
    spec: BumpSpec,
    total: OnceLock<Result<f64>>,
}

impl Bump {
    pub fn new(spec: BumpSpec) -> Self {
        Self {
            spec,
            total: OnceLock::new(),
        }
    }

    pub fn spec(&self) -> &BumpSpec {
        &self.spec
    }

    pub fn total(&self) -> Result<f64> {
        self.total
            .get_or_init(|| {
                let k = self.spec.k;
                adaptive_simpson(&|s| self.spec.f(s), -k, k, self.spec.quadrature_tol)
            })
            .clone()
    }

    pub fn integral(&self, x: f64) -> Result<f64> {
        let k = self.spec.k;
        if x <= -k {
            Ok(0.0)
        } else if x >= k {
            self.total()
        } else {
            adaptive_simpson(&|s| self.spec.f(s), -k, x, self.spec.quadrature_tol)
        }
    }
}

pub fn bump_integral(bump: &Bump, x: f64) -> Result<f64> {
    bump.integral(x)
}

const GL8_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

fn gauss_legendre8<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
        acc += w * (f(c - h * x) + f(c + h * x));
    }
    acc * h
}

/// Smooth step `rho(r) = F_k(r - (k + 1/k)) / F_k(k)`.
///
/// Cumulative integrals at knots `-k + j/16` come from adaptive Simpson; the
/// remainder inside a knot cell uses a fixed 8-point Gauss-Legendre rule so
/// that `rho` is smooth in `r` at the level finite differencing can see.
pub struct SmoothStep {
    spec: BumpSpec,
    total: f64,
    knots: Vec<f64>,
}

impl fmt::Debug for SmoothStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothStep")
            .field("spec", &self.spec)
            .field("total", &self.total)
            .finish()
    }
}

impl SmoothStep {
    pub fn new(spec: BumpSpec) -> Result<Self> {
        let k = spec.k;
        let cells = ((2.0 * k) / KNOT_SPACING).ceil() as usize;
        let h = 2.0 * k / cells as f64;
        let cell_tol = spec.quadrature_tol / cells as f64;
        let mut knots = Vec::with_capacity(cells + 1);
        knots.push(0.0);
        let mut acc = 0.0;
        for j in 0..cells {
            let a = -k + j as f64 * h;
            let b = if j + 1 == cells { k } else { a + h };
            acc += adaptive_simpson(&|s| spec.f(s), a, b, cell_tol)?;
            knots.push(acc);
        }
        Ok(Self {
            spec,
            total: acc,
            knots,
        })
    }

    pub fn spec(&self) -> &BumpSpec {
        &self.spec
    }

    pub fn k(&self) -> f64 {
        self.spec.k
    }

    /// `F_k(k)`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn shift(&self) -> f64 {
        self.spec.k + 1.0 / self.spec.k
    }

    /// Tabulated `F_k(x)`.
    pub fn cumulative(&self, x: f64) -> f64 {
        let k = self.spec.k;
        if x <= -k {
            return 0.0;
        }
        if x >= k {
            return self.total;
        }
        let cells = self.knots.len() - 1;
        let h = 2.0 * k / cells as f64;
        let j = (((x + k) / h).floor() as usize).min(cells - 1);
        let a = -k + j as f64 * h;
        self.knots[j] + gauss_legendre8(&|s| self.spec.f(s), a, x)
    }

    /// `(rho, rho', rho'')` at radius `r`.
    pub fn rho(&self, r: f64) -> (f64, f64, f64) {
        let k = self.spec.k;
        let x = r - self.shift();
        if x <= -k {
            (0.0, 0.0, 0.0)
        } else if x >= k {
            (1.0, 0.0, 0.0)
        } else {
            (
                (self.cumulative(x) / self.total).clamp(0.0, 1.0),
                self.spec.f(x) / self.total,
                self.spec.f_prime(x) / self.total,
            )
        }
    }
}

pub fn rho(step: &SmoothStep, r: f64) -> (f64, f64, f64) {
    step.rho(r)
}

/// Values and first two derivatives of the warping pair at one radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProfileJet {
    pub sigma: f64,
    pub dsigma: f64,
    pub ddsigma: f64,
    pub tau: f64,
    pub dtau: f64,
    pub ddtau: f64,
}

impl ProfileJet {
    fn hyperbolic(r: f64) -> Self {
        let (s, c) = (r.sinh(), r.cosh());
        Self {
            sigma: s,
            dsigma: c,
            ddsigma: s,
            tau: c,
            dtau: s,
            ddtau: c,
        }
    }

    fn flat(r: f64) -> Self {
        Self {
            sigma: r,
            dsigma: 1.0,
            ddsigma: 0.0,
            tau: 1.0,
            dtau: 0.0,
            ddtau: 0.0,
        }
    }
}

#[derive(Clone, Debug)]
pub enum WarpingProfile {
    Hyperbolic,
    Flat,
    Interpolated(Arc<SmoothStep>),
}

impl WarpingProfile {
    pub fn interpolated(k: f64) -> Result<Self> {
        Ok(Self::Interpolated(Arc::new(SmoothStep::new(
            BumpSpec::with_k(k)?,
        )?)))
    }

    pub fn from_spec(spec: BumpSpec) -> Result<Self> {
        Ok(Self::Interpolated(Arc::new(SmoothStep::new(spec)?)))
    }

    pub fn name(&self) -> String {
        match self {
            Self::Hyperbolic => "hyperbolic".into(),
            Self::Flat => "flat".into(),
            Self::Interpolated(s) => format!("interpolated(k={})", s.k()),
        }
    }

    /// Radius beyond which the profile is exactly hyperbolic. Zero when the
    /// profile has no transition.
    pub fn matching_radius(&self) -> f64 {
        match self {
            Self::Interpolated(s) => 2.0 * s.k() + 1.0,
            _ => 0.0,
        }
    }

    /// Radius of the tube around the axis on which the metric is flat.
    pub fn flat_radius(&self) -> f64 {
        match self {
            Self::Interpolated(s) => 1.0 / (2.0 * s.k() + 1.0),
            Self::Flat => f64::INFINITY,
            Self::Hyperbolic => 0.0,
        }
    }

    pub fn step(&self) -> Option<&SmoothStep> {
        match self {
            Self::Interpolated(s) => Some(s),
            _ => None,
        }
    }

    /// `(rho, rho', rho'')`; identically one for the hyperbolic profile and
    /// zero for the flat one.
    pub fn rho(&self, r: f64) -> (f64, f64, f64) {
        match self {
            Self::Hyperbolic => (1.0, 0.0, 0.0),
            Self::Flat => (0.0, 0.0, 0.0),
            Self::Interpolated(s) => s.rho(r),
        }
    }

    pub fn sigma_tau(&self, r: f64) -> Result<ProfileJet> {
        if r < 0.0 || r.is_nan() {
            return Err(Error::NegativeRadius(r));
        }
        Ok(self.eval(r))
    }

    pub(crate) fn eval(&self, r: f64) -> ProfileJet {
        match self {
            Self::Hyperbolic => ProfileJet::hyperbolic(r),
            Self::Flat => ProfileJet::flat(r),
            Self::Interpolated(step) => {
                let (p, dp, ddp) = step.rho(r);
                if p == 0.0 && dp == 0.0 && ddp == 0.0 {
                    return ProfileJet::flat(r);
                }
                if p == 1.0 && dp == 0.0 && ddp == 0.0 {
                    return ProfileJet::hyperbolic(r);
                }
                let (s, c) = (r.sinh(), r.cosh());
                let sm = s - r;
                let cm = c - 1.0;
                ProfileJet {
                    sigma: p * s + (1.0 - p) * r,
                    dsigma: dp * sm + p * c + (1.0 - p),
                    ddsigma: ddp * sm + 2.0 * dp * cm + p * s,
                    tau: p * c + (1.0 - p),
                    dtau: dp * cm + p * s,
                    ddtau: ddp * cm + 2.0 * dp * s + p * c,
                }
            }
        }
    }
}

pub fn sigma_tau(profile: &WarpingProfile, r: f64) -> Result<ProfileJet> {
    profile.sigma_tau(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileCheck {
    pub name: String,
    pub passed: bool,
    pub worst_value: f64,
    pub worst_location: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub checks: Vec<ProfileCheck>,
    pub grid: (f64, f64, f64),
}

impl PropertyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&ProfileCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const PROFILE_CHECK_NAMES: [&str; 7] = [
    "sigma >= 0",
    "tau >= 0",
    "sigma' >= 1",
    "tau' >= 0",
    "sigma'' >= 0",
    "tau'' >= 0",
    "rho'' + rho >= 0",
];

fn margins(profile: &WarpingProfile, r: f64) -> [f64; 7] {
    let j = profile.eval(r);
    let (p, _, ddp) = profile.rho(r);
    [
        j.sigma,
        j.tau,
        j.dsigma - 1.0,
        j.dtau,
        j.ddsigma,
        j.ddtau,
        ddp + p,
    ]
}

fn grid_len(grid_max: f64, grid_step: f64) -> usize {
    (grid_max / grid_step + 1e-9).floor() as usize + 1
}

/// Evaluates the seven profile inequalities on `0, step, 2 step, ..`.
pub fn verify_profile(
    profile: &WarpingProfile,
    grid_max: f64,
    grid_step: f64,
) -> Result<PropertyReport> {
    if !(grid_step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    let big_r = profile.matching_radius();
    if !(grid_max > big_r + 1.0) {
        return Err(Error::InvalidParameter(format!(
            "grid max {grid_max} must exceed matching radius + 1 = {}",
            big_r + 1.0
        )));
    }
    let n = grid_len(grid_max, grid_step);
    let worst = (0..n)
        .into_par_iter()
        .map(|i| {
            let r = i as f64 * grid_step;
            let m = margins(profile, r);
            m.map(|v| (v, i))
        })
        .reduce(
            || [(f64::INFINITY, usize::MAX); 7],
            |a, b| {
                let mut out = a;
                for c in 0..7 {
                    if b[c].0 < out[c].0 || (b[c].0 == out[c].0 && b[c].1 < out[c].1) {
                        out[c] = b[c];
                    }
                }
                out
            },
        );
    let checks = PROFILE_CHECK_NAMES
        .iter()
        .zip(worst.iter())
        .map(|(name, &(v, i))| ProfileCheck {
            name: (*name).to_string(),
            passed: v >= VERIFY_SLACK,
            worst_value: v,
            worst_location: i as f64 * grid_step,
        })
        .collect();
    Ok(PropertyReport {
        checks,
        grid: (0.0, grid_max, grid_step),
    })
}

/// Largest deviations from the piecewise boundary behaviour on the grid:
/// absolute on the inner flat piece, relative on the outer hyperbolic piece.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundaryMatch {
    pub inner_sigma: f64,
    pub inner_tau: f64,
    pub outer_sigma: f64,
    pub outer_tau: f64,
}

impl BoundaryMatch {
    pub fn max(&self) -> f64 {
        self.inner_sigma
            .max(self.inner_tau)
            .max(self.outer_sigma)
            .max(self.outer_tau)
    }
}

pub fn boundary_match(profile: &WarpingProfile, grid_max: f64, grid_step: f64) -> BoundaryMatch {
    let big_r = profile.matching_radius();
    let mut out = BoundaryMatch {
        inner_sigma: 0.0,
        inner_tau: 0.0,
        outer_sigma: 0.0,
        outer_tau: 0.0,
    };
    if big_r == 0.0 {
        return out;
    }
    for i in 0..grid_len(grid_max, grid_step) {
        let r = i as f64 * grid_step;
        let j = profile.eval(r);
        if r <= 1.0 / big_r {
            out.inner_sigma = out.inner_sigma.max((j.sigma - r).abs());
            out.inner_tau = out.inner_tau.max((j.tau - 1.0).abs());
        }
        if r >= big_r {
            out.outer_sigma = out.outer_sigma.max(((j.sigma - r.sinh()) / r.sinh()).abs());
            out.outer_tau = out.outer_tau.max(((j.tau - r.cosh()) / r.cosh()).abs());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k19() -> WarpingProfile {
        WarpingProfile::interpolated(19.0).unwrap()
    }

    #[test]
    fn bump_values() {
        let spec = BumpSpec::with_k(18.0).unwrap();
        assert!((bump_f(&spec, 0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(bump_f(&spec, 18.0), 0.0);
        assert_eq!(bump_f(&spec, -25.0), 0.0);
        assert!((bump_f(&spec, 9.0) - (-4.0f64 / 3.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn bump_spec_rejects_bad_parameters() {
        assert!(BumpSpec::new(0.5, 1e-12).is_err());
        assert!(BumpSpec::new(19.0, 0.0).is_err());
    }

    #[test]
    fn integral_endpoints_and_symmetry() {
        let bump = Bump::new(BumpSpec::with_k(18.0).unwrap());
        assert_eq!(bump.integral(-18.0).unwrap(), 0.0);
        assert_eq!(bump.integral(-40.0).unwrap(), 0.0);
        let total = bump.integral(18.0).unwrap();
        assert_eq!(bump.integral(30.0).unwrap(), total);
        assert!((bump.integral(0.0).unwrap() - total / 2.0).abs() < 1e-11);
    }

    #[test]
    fn unreachable_tolerance_is_reported() {
        let bump = Bump::new(BumpSpec::new(18.0, 1e-22).unwrap());
        assert!(matches!(
            bump.integral(3.0),
            Err(Error::QuadratureNonconvergence { .. })
        ));
    }

    #[test]
    fn tabulated_integral_matches_adaptive() {
        let spec = BumpSpec::with_k(19.0).unwrap();
        let bump = Bump::new(spec);
        let step = SmoothStep::new(spec).unwrap();
        assert!((step.total() - bump.total().unwrap()).abs() < 1e-11);
        for i in 0..=76 {
            let x = -19.0 + 0.5 * i as f64 + 0.0123;
            let direct = bump.integral(x).unwrap();
            assert!((step.cumulative(x) - direct).abs() < 1e-11, "x = {x}");
        }
    }

    #[test]
    fn rho_examples() {
        let step = SmoothStep::new(BumpSpec::with_k(18.0).unwrap()).unwrap();
        assert_eq!(step.rho(0.05), (0.0, 0.0, 0.0));
        assert_eq!(step.rho(40.0), (1.0, 0.0, 0.0));
        let (half, _, dd) = step.rho(18.0 + 1.0 / 18.0);
        assert!((half - 0.5).abs() < 1e-12);
        assert!(dd.abs() < 1e-15);
    }

    #[test]
    fn sigma_tau_examples() {
        let j = sigma_tau(&WarpingProfile::Hyperbolic, 1.0).unwrap();
        assert!((j.sigma - 1.175_201_193_643_801_4).abs() < 1e-12);
        assert!((j.tau - 1.543_080_634_815_243_7).abs() < 1e-12);
        let p = k19();
        let j = p.sigma_tau(0.02).unwrap();
        assert_eq!((j.sigma, j.tau), (0.02, 1.0));
        let j = p.sigma_tau(40.0).unwrap();
        assert_eq!((j.sigma, j.tau), (40f64.sinh(), 40f64.cosh()));
        assert_eq!(
            sigma_tau(&WarpingProfile::Flat, 3.0).unwrap(),
            ProfileJet {
                sigma: 3.0,
                dsigma: 1.0,
                ddsigma: 0.0,
                tau: 1.0,
                dtau: 0.0,
                ddtau: 0.0
            }
        );
        assert!(matches!(p.sigma_tau(-1.0), Err(Error::NegativeRadius(_))));
    }

    #[test]
    fn analytic_derivatives_match_finite_differences() {
        let p = k19();
        let big_r = p.matching_radius();
        let h = 1e-5;
        let mut r = 1.0 / (2.0 * big_r);
        while r <= 2.0 * big_r {
            let j = p.eval(r);
            let (jp, jm) = (p.eval(r + h), p.eval(r - h));
            let pairs = [
                (j.dsigma, (jp.sigma - jm.sigma) / (2.0 * h)),
                (j.ddsigma, (jp.dsigma - jm.dsigma) / (2.0 * h)),
                (j.dtau, (jp.tau - jm.tau) / (2.0 * h)),
                (j.ddtau, (jp.dtau - jm.dtau) / (2.0 * h)),
            ];
            for (a, fd) in pairs {
                assert!(
                    (a - fd).abs() <= 1e-5 * a.abs().max(1.0),
                    "r = {r}: {a} vs {fd}"
                );
            }
            r += 0.0731;
        }
    }

    #[test]
    fn rho_is_monotone_in_unit_interval() {
        let p = k19();
        let mut prev = 0.0;
        for i in 0..=4500 {
            let (v, _, _) = p.rho(i as f64 * 0.01);
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn verify_rejects_short_grid() {
        assert!(verify_profile(&k19(), 30.0, 1e-3).is_err());
        assert!(verify_profile(&k19(), 60.0, 0.0).is_err());
    }

    #[test]
    fn hyperbolic_profile_passes() {
        let rep = verify_profile(&WarpingProfile::Hyperbolic, 60.0, 1e-3).unwrap();
        assert!(rep.all_passed());
        assert_eq!(rep.checks.len(), 7);
    }

    #[test]
    fn boundary_match_for_default_profile() {
        let bm = boundary_match(&k19(), 60.0, 1e-3);
        assert!(bm.max() <= 1e-12, "{bm:?}");
    }
}
