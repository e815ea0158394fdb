//! Warped metrics `dr^2 + sigma(r)^2 dOmega^2 + tau(r)^2 dz^2` in polar and
//! Cartesian charts, with Levi-Civita connection and curvature.
//!
//! Curvature convention: `R(u, v, u, v) = K(u, v) (|u|^2 |v|^2 - <u, v>^2)`,
//! so `R_{theta r theta r} = -sigma sigma''`.

pub mod coords;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::profiles::WarpingProfile;

/// Polar charts are rejected below this radius.
pub const R_MIN: f64 = 1e-8;
const HYPERBOLIC_SERIES_RADIUS: f64 = 0.5;
const SERIES_TERMS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChartKind {
    Polar,
    Cartesian,
    FourDModel,
}

impl ChartKind {
    pub fn name(self) -> &'static str {
        match self {
            ChartKind::Polar => "polar",
            ChartKind::Cartesian => "cartesian",
            ChartKind::FourDModel => "four-d-model",
        }
    }
}

/// A coordinate chart carrying the warped metric on `R^{2n} x R` (or on
/// `R^3 x R` for the four-dimensional model).
#[derive(Clone, Debug)]
pub struct MetricChart {
    pub n: usize,
    pub profile: WarpingProfile,
    pub kind: ChartKind,
}

/// Metric, inverse metric and coordinate derivatives at a point.
/// `dg[(k * d + i) * d + j] = d_k g_ij`; `ddg[((k * d + l) * d + i) * d + j]`.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub dim: usize,
    pub g: Vec<f64>,
    pub ginv: Vec<f64>,
    pub dg: Vec<f64>,
    pub ddg: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    pub dim: usize,
    /// `data[(i * d + j) * d + k] = Gamma^i_{jk}`
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[(i * self.dim + j) * self.dim + k]
    }

    /// `Gamma^i_{jk} a^j b^k`.
    pub fn contract(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| {
                let mut acc = 0.0;
                for j in 0..d {
                    if a[j] == 0.0 {
                        continue;
                    }
                    let row = &self.data[(i * d + j) * d..(i * d + j + 1) * d];
                    let mut inner = 0.0;
                    for k in 0..d {
                        inner += row[k] * b[k];
                    }
                    acc += a[j] * inner;
                }
                acc
            })
            .collect()
    }
}

/// Fully lowered curvature tensor `R_{ijkl} = <R(e_i, e_j) e_k, e_l>`.
#[derive(Clone, Debug, PartialEq)]
pub struct Riemann {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl Riemann {
    fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim * dim],
        }
    }

    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    pub fn contract(&self, a: &[f64], b: &[f64], c: &[f64], e: &[f64]) -> f64 {
        let d = self.dim;
        let mut acc = 0.0;
        for i in 0..d {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                if b[j] == 0.0 {
                    continue;
                }
                for k in 0..d {
                    if c[k] == 0.0 {
                        continue;
                    }
                    let base = self.idx(i, j, k, 0);
                    let mut inner = 0.0;
                    for l in 0..d {
                        inner += self.data[base + l] * e[l];
                    }
                    acc += a[i] * b[j] * c[k] * inner;
                }
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Largest violation of the pair (anti)symmetries and the first Bianchi
    /// identity, relative to the largest component.
    pub fn symmetry_defect(&self) -> f64 {
        let d = self.dim;
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let r = self.get(i, j, k, l);
                        worst = worst
                            .max((r + self.get(j, i, k, l)).abs())
                            .max((r + self.get(i, j, l, k)).abs())
                            .max((r - self.get(k, l, i, j)).abs())
                            .max((r + self.get(i, k, l, j) + self.get(i, l, j, k)).abs());
                    }
                }
            }
        }
        worst / scale
    }
}

#[derive(Clone, Copy, Debug)]
struct RadialData {
    a: f64,
    da: f64,
    b: f64,
    db: f64,
    tau2: f64,
    c: f64,
}

fn factorial_table() -> [f64; 2 * SERIES_TERMS + 2] {
    let mut t = [1.0; 2 * SERIES_TERMS + 2];
    for i in 1..t.len() {
        t[i] = t[i - 1] * i as f64;
    }
    t
}

/// `A = (sigma/r)^2`, `B = (1 - A)/r^2` and `C = tau tau'/r`, with derivatives
/// in `s = r^2`, evaluated without cancellation near the axis.
fn radial_data(profile: &WarpingProfile, s: f64) -> RadialData {
    let flat = RadialData {
        a: 1.0,
        da: 0.0,
        b: 0.0,
        db: 0.0,
        tau2: 1.0,
        c: 0.0,
    };
    let r = s.sqrt();
    match profile {
        WarpingProfile::Flat => flat,
        WarpingProfile::Hyperbolic if r < HYPERBOLIC_SERIES_RADIUS => {
            let fact = factorial_table();
            let (mut u, mut du, mut w, mut dw) = (1.0, 0.0, 0.0, 0.0);
            let mut pow = 1.0; // s^(j-1)
            let mut pow2 = 1.0; // s^(j-2)
            for j in 1..=SERIES_TERMS {
                let c = 1.0 / fact[2 * j + 1];
                u += c * pow * s;
                du += j as f64 * c * pow;
                w += c * pow;
                if j >= 2 {
                    dw += (j - 1) as f64 * c * pow2;
                    pow2 *= s;
                }
                pow *= s;
            }
            let ch = r.cosh();
            RadialData {
                a: u * u,
                da: 2.0 * u * du,
                b: -(2.0 * w + w * w * s),
                db: -(2.0 * dw + 2.0 * w * dw * s + w * w),
                tau2: ch * ch,
                c: ch * u,
            }
        }
        _ => {
            if profile.rho(r) == (0.0, 0.0, 0.0) {
                return flat;
            }
            let j = profile.eval(r);
            let u = j.sigma / r;
            let a = u * u;
            let da_dr = 2.0 * u * (j.dsigma * r - j.sigma) / (r * r);
            let num = r * r - j.sigma * j.sigma;
            let r4 = s * s;
            let db_dr = (2.0 * r - 2.0 * j.sigma * j.dsigma) / r4 - 4.0 * num / (r4 * r);
            RadialData {
                a,
                da: da_dr / (2.0 * r),
                b: num / r4,
                db: db_dr / (2.0 * r),
                tau2: j.tau * j.tau,
                c: j.tau * j.dtau / r,
            }
        }
    }
}

struct Factor {
    coord: usize,
    v: f64,
    d1: f64,
    d2: f64,
}

impl MetricChart {
    pub fn new(kind: ChartKind, n: usize, profile: WarpingProfile) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "chart parameter n must be >= 1".into(),
            ));
        }
        Ok(Self { n, profile, kind })
    }

    pub fn polar(n: usize, profile: WarpingProfile) -> Result<Self> {
        Self::new(ChartKind::Polar, n, profile)
    }

    pub fn cartesian(n: usize, profile: WarpingProfile) -> Result<Self> {
        Self::new(ChartKind::Cartesian, n, profile)
    }

    pub fn four_d(profile: WarpingProfile) -> Self {
        Self {
            n: 1,
            profile,
            kind: ChartKind::FourDModel,
        }
    }

    /// Same metric, different chart kind (four-d model stays four-d).
    pub fn with_kind(&self, kind: ChartKind) -> Self {
        Self {
            n: self.n,
            profile: self.profile.clone(),
            kind,
        }
    }

    /// Dimension of the rotationally symmetric factor.
    pub fn base_dim(&self) -> usize {
        match self.kind {
            ChartKind::FourDModel => 3,
            _ => 2 * self.n,
        }
    }

    pub fn dim(&self) -> usize {
        self.base_dim() + 1
    }

    pub fn is_polar(&self) -> bool {
        self.kind != ChartKind::Cartesian
    }

    /// Distance from the axis.
    pub fn radius(&self, x: &[f64]) -> f64 {
        if self.is_polar() {
            x[0]
        } else {
            x[..self.base_dim()]
                .iter()
                .map(|c| c * c)
                .sum::<f64>()
                .sqrt()
        }
    }

    pub fn validate(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch(x.len(), self.dim()));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegeneratePoint("non-finite coordinate".into()));
        }
        if self.is_polar() {
            if x[0] < R_MIN {
                return Err(Error::DegeneratePoint(format!(
                    "polar radius {} below {R_MIN:e}",
                    x[0]
                )));
            }
            let b = self.base_dim();
            for (i, &a) in x[1..b - 1].iter().enumerate() {
                if a.sin() <= 0.0 {
                    return Err(Error::DegeneratePoint(format!(
                        "angle {} = {a} outside (0, pi)",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_cartesian(&self, x: &[f64]) -> Vec<f64> {
        if self.is_polar() {
            coords::polar_to_cartesian(self.base_dim(), x)
        } else {
            x.to_vec()
        }
    }

    pub fn from_cartesian(&self, x: &[f64]) -> Vec<f64> {
        if self.is_polar() {
            coords::cartesian_to_polar(self.base_dim(), x)
        } else {
            x.to_vec()
        }
    }

    pub fn metric_jet(&self, x: &[f64], second: bool) -> Result<MetricJet> {
        self.validate(x)?;
        Ok(if self.is_polar() {
            self.polar_jet(x, second)
        } else {
            self.cartesian_jet(x)
        })
    }

    fn polar_jet(&self, x: &[f64], second: bool) -> MetricJet {
        let d = self.dim();
        let b = self.base_dim();
        let j = self.profile.eval(x[0]);
        let (s, ds, dds) = (j.sigma, j.dsigma, j.ddsigma);
        let (t, dt, ddt) = (j.tau, j.dtau, j.ddtau);
        let mut diag_factors: Vec<Vec<Factor>> = Vec::with_capacity(d);
        diag_factors.push(vec![]);
        for i in 1..b {
            let mut f = vec![Factor {
                coord: 0,
                v: s * s,
                d1: 2.0 * s * ds,
                d2: 2.0 * ds * ds + 2.0 * s * dds,
            }];
            for c in 1..i {
                let a = x[c];
                let sn = a.sin();
                f.push(Factor {
                    coord: c,
                    v: sn * sn,
                    d1: (2.0 * a).sin(),
                    d2: 2.0 * (2.0 * a).cos(),
                });
            }
            diag_factors.push(f);
        }
        diag_factors.push(vec![Factor {
            coord: 0,
            v: t * t,
            d1: 2.0 * t * dt,
            d2: 2.0 * dt * dt + 2.0 * t * ddt,
        }]);

        let mut g = vec![0.0; d * d];
        let mut ginv = vec![0.0; d * d];
        let mut dg = vec![0.0; d * d * d];
        let mut ddg = if second {
            Some(vec![0.0; d * d * d * d])
        } else {
            None
        };
        for (i, factors) in diag_factors.iter().enumerate() {
            let product_except = |skip: &[usize]| -> f64 {
                factors
                    .iter()
                    .enumerate()
                    .filter(|(n, _)| !skip.contains(n))
                    .map(|(_, f)| f.v)
                    .product()
            };
            let val = product_except(&[]);
            g[i * d + i] = val;
            ginv[i * d + i] = 1.0 / val;
            for (na, fa) in factors.iter().enumerate() {
                dg[(fa.coord * d + i) * d + i] = product_except(&[na]) * fa.d1;
                if let Some(ddg) = ddg.as_mut() {
                    ddg[((fa.coord * d + fa.coord) * d + i) * d + i] =
                        product_except(&[na]) * fa.d2;
                    for (nb, fb) in factors.iter().enumerate() {
                        if nb != na {
                            ddg[((fa.coord * d + fb.coord) * d + i) * d + i] =
                                product_except(&[na, nb]) * fa.d1 * fb.d1;
                        }
                    }
                }
            }
        }
        MetricJet {
            dim: d,
            g,
            ginv,
            dg,
            ddg,
        }
    }

    fn cartesian_jet(&self, x: &[f64]) -> MetricJet {
        let d = self.dim();
        let b = self.base_dim();
        let s: f64 = x[..b].iter().map(|c| c * c).sum();
        let rd = radial_data(&self.profile, s);
        let mut g = vec![0.0; d * d];
        let mut ginv = vec![0.0; d * d];
        let mut dg = vec![0.0; d * d * d];
        for i in 0..b {
            for j in 0..b {
                let delta = if i == j { 1.0 } else { 0.0 };
                g[i * d + j] = rd.a * delta + rd.b * x[i] * x[j];
                ginv[i * d + j] = (delta - rd.b * x[i] * x[j]) / rd.a;
            }
        }
        g[d * d - 1] = rd.tau2;
        ginv[d * d - 1] = 1.0 / rd.tau2;
        for k in 0..b {
            for i in 0..b {
                for j in 0..b {
                    let dij = if i == j { 1.0 } else { 0.0 };
                    let dik = if i == k { 1.0 } else { 0.0 };
                    let djk = if j == k { 1.0 } else { 0.0 };
                    dg[(k * d + i) * d + j] = 2.0 * rd.da * x[k] * dij
                        + 2.0 * rd.db * x[k] * x[i] * x[j]
                        + rd.b * (dik * x[j] + djk * x[i]);
                }
            }
            dg[(k * d + b) * d + b] = 2.0 * rd.c * x[k];
        }
        MetricJet {
            dim: d,
            g,
            ginv,
            dg,
            ddg: None,
        }
    }

    pub fn metric_tensor(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        self.validate(x)?;
        let d = self.dim();
        let jet = self.metric_jet(x, false)?;
        Ok(DMatrix::from_row_slice(d, d, &jet.g))
    }

    pub fn inner(&self, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        let jet = self.metric_jet(x, false)?;
        Ok(jet_inner(&jet, u, v))
    }

    pub fn christoffel(&self, x: &[f64]) -> Result<Christoffel> {
        let jet = self.metric_jet(x, false)?;
        Ok(christoffel_from_jet(&jet))
    }

    /// Curvature tensor: analytic second derivatives of the metric in polar
    /// charts, central differences of the connection in the Cartesian chart.
    pub fn riemann(&self, x: &[f64]) -> Result<Riemann> {
        if self.is_polar() {
            let jet = self.metric_jet(x, true)?;
            Ok(riemann_from_jet(&jet))
        } else {
            self.riemann_finite_difference(x)
        }
    }

    pub fn fd_step(&self, x: &[f64]) -> f64 {
        1e-5f64.max(1e-5 * self.radius(x))
    }

    /// Curvature from central differences of the Christoffel symbols at step
    /// `max(1e-5, 1e-5 r)`; available in every chart.
    pub fn riemann_finite_difference(&self, x: &[f64]) -> Result<Riemann> {
        let jet = self.metric_jet(x, false)?;
        let d = jet.dim;
        let h = self.fd_step(x);
        let gamma = christoffel_from_jet(&jet);
        // dgamma[l][(i*d + j)*d + k] = d_l Gamma^i_jk
        let mut dgamma = Vec::with_capacity(d);
        for l in 0..d {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[l] += h;
            xm[l] -= h;
            let gp = self.christoffel(&xp)?;
            let gm = self.christoffel(&xm)?;
            dgamma.push(
                gp.data
                    .iter()
                    .zip(gm.data.iter())
                    .map(|(a, b)| (a - b) / (2.0 * h))
                    .collect::<Vec<_>>(),
            );
        }
        let gi = |i: usize, j: usize, k: usize| gamma.data[(i * d + j) * d + k];
        let dgi = |l: usize, i: usize, j: usize, k: usize| dgamma[l][(i * d + j) * d + k];
        // R^i_{jkl}
        let mut up = vec![0.0; d * d * d * d];
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut v = dgi(k, i, l, j) - dgi(l, i, k, j);
                        for m in 0..d {
                            v += gi(i, k, m) * gi(m, l, j) - gi(i, l, m) * gi(m, k, j);
                        }
                        up[((i * d + j) * d + k) * d + l] = v;
                    }
                }
            }
        }
        // up holds <R(e_k, e_l) e_j, dx^i> for R(X, Y) = [D_X, D_Y] - D_[X,Y];
        // the tensor here uses the opposite operator sign, so
        // R_{ijkl} = -g_{lm} R^m_{kij}.
        let mut out = Riemann::zeros(d);
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let mut v = 0.0;
                        for m in 0..d {
                            v += jet.g[l * d + m] * up[((m * d + k) * d + i) * d + j];
                        }
                        let idx = out.idx(i, j, k, l);
                        out.data[idx] = -v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Gram-Schmidt in the metric inner product.
    pub fn orthonormalize(&self, x: &[f64], vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let jet = self.metric_jet(x, false)?;
        orthonormalize_with(&jet, vectors)
    }
}

pub(crate) fn jet_inner(jet: &MetricJet, u: &[f64], v: &[f64]) -> f64 {
    let d = jet.dim;
    let mut acc = 0.0;
    for i in 0..d {
        if u[i] == 0.0 {
            continue;
        }
        for j in 0..d {
            acc += jet.g[i * d + j] * u[i] * v[j];
        }
    }
    acc
}

pub(crate) fn orthonormalize_with(jet: &MetricJet, vectors: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for e in &out {
            let c = jet_inner(jet, &w, e);
            for (wi, ei) in w.iter_mut().zip(e.iter()) {
                *wi -= c * ei;
            }
        }
        let norm2 = jet_inner(jet, &w, &w);
        let orig = jet_inner(jet, v, v);
        if !(norm2 > 1e-14 * orig) || !(norm2 > 0.0) {
            return Err(Error::DegeneratePlane(norm2));
        }
        let norm = norm2.sqrt();
        out.push(w.iter().map(|c| c / norm).collect());
    }
    Ok(out)
}

pub fn christoffel_from_jet(jet: &MetricJet) -> Christoffel {
    let d = jet.dim;
    let dg = |k: usize, i: usize, j: usize| jet.dg[(k * d + i) * d + j];
    // lowered Gamma_{l jk}
    let mut lowered = vec![0.0; d * d * d];
    for l in 0..d {
        for j in 0..d {
            for k in j..d {
                let v = 0.5 * (dg(j, l, k) + dg(k, l, j) - dg(l, j, k));
                lowered[(l * d + j) * d + k] = v;
                lowered[(l * d + k) * d + j] = v;
            }
        }
    }
    let mut data = vec![0.0; d * d * d];
    for i in 0..d {
        for l in 0..d {
            let gil = jet.ginv[i * d + l];
            if gil == 0.0 {
                continue;
            }
            for jk in 0..d * d {
                data[i * d * d + jk] += gil * lowered[l * d * d + jk];
            }
        }
    }
    Christoffel { dim: d, data }
}

/// `R_{iklm} = 1/2 (g_im,kl + g_kl,im - g_il,km - g_km,il)
///            + g_np (Gamma^n_kl Gamma^p_im - Gamma^n_km Gamma^p_il)`.
pub fn riemann_from_jet(jet: &MetricJet) -> Riemann {
    let d = jet.dim;
    let ddg = jet
        .ddg
        .as_ref()
        .expect("second metric derivatives required");
    let h = |a: usize, b: usize, i: usize, j: usize| ddg[((a * d + b) * d + i) * d + j];
    let gamma = christoffel_from_jet(jet);
    // lowered Gamma_{p im} = g_np Gamma^n_im
    let mut low = vec![0.0; d * d * d];
    for p in 0..d {
        for n in 0..d {
            let gpn = jet.g[p * d + n];
            if gpn == 0.0 {
                continue;
            }
            for im in 0..d * d {
                low[p * d * d + im] += gpn * gamma.data[n * d * d + im];
            }
        }
    }
    let mut out = Riemann::zeros(d);
    for i in 0..d {
        for k in 0..d {
            for l in 0..d {
                for m in 0..d {
                    let mut v =
                        0.5 * (h(k, l, i, m) + h(i, m, k, l) - h(k, m, i, l) - h(i, l, k, m));
                    for n in 0..d {
                        v += gamma.get(n, k, l) * low[(n * d + i) * d + m]
                            - gamma.get(n, k, m) * low[(n * d + i) * d + l];
                    }
                    let idx = out.idx(i, k, l, m);
                    out.data[idx] = v;
                }
            }
        }
    }
    out
}

/// The six distinguished components of the four-dimensional model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurvatureComponents {
    pub theta_r_theta_r: f64,
    pub phi_r_phi_r: f64,
    pub z_r_z_r: f64,
    pub phi_theta_phi_theta: f64,
    pub theta_z_theta_z: f64,
    pub phi_z_phi_z: f64,
}

impl CurvatureComponents {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.theta_r_theta_r,
            self.phi_r_phi_r,
            self.z_r_z_r,
            self.phi_theta_phi_theta,
            self.theta_z_theta_z,
            self.phi_z_phi_z,
        ]
    }

    pub fn max(&self) -> f64 {
        self.as_array()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Index quadruples `(i, j, i, j)` in the `(r, theta, phi, z)` ordering.
    pub const INDICES: [(usize, usize); 6] = [(1, 0), (2, 0), (3, 0), (2, 1), (1, 3), (2, 3)];

    /// Sectional curvature of an orthonormal pair whose members are each
    /// aligned with coordinate directions, as the six-term combination.
    pub fn six_term_combination(&self, u: &[f64], v: &[f64]) -> f64 {
        Self::INDICES
            .iter()
            .zip(self.as_array())
            .map(|(&(a, b), comp)| (u[b] * u[b] * v[a] * v[a] + u[a] * u[a] * v[b] * v[b]) * comp)
            .sum()
    }

    /// `R(u, v, u, v)` for arbitrary `u, v`: sum over pairs of
    /// `R_abab (u_a v_b - u_b v_a)^2`.
    pub fn wedge_combination(&self, u: &[f64], v: &[f64]) -> f64 {
        Self::INDICES
            .iter()
            .zip(self.as_array())
            .map(|(&(a, b), comp)| {
                let w = u[a] * v[b] - u[b] * v[a];
                w * w * comp
            })
            .sum()
    }
}

pub fn curvature_components_closed_form(
    profile: &WarpingProfile,
    r: f64,
    theta: f64,
) -> Result<CurvatureComponents> {
    if !(r > 0.0) {
        return Err(Error::DegeneratePoint(format!(
            "radius {r} must be positive"
        )));
    }
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::DegeneratePoint(format!(
            "theta {theta} outside (0, pi)"
        )));
    }
    let j = profile.eval(r);
    let s2 = theta.sin().powi(2);
    let mixed = -j.sigma * j.dsigma * j.tau * j.dtau;
    Ok(CurvatureComponents {
        theta_r_theta_r: -j.sigma * j.ddsigma,
        phi_r_phi_r: -j.sigma * j.ddsigma * s2,
        z_r_z_r: -j.tau * j.ddtau,
        phi_theta_phi_theta: (1.0 - j.dsigma * j.dsigma) * j.sigma * j.sigma * s2,
        theta_z_theta_z: mixed,
        phi_z_phi_z: mixed * s2,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TangentPlane {
    pub point: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

pub fn sectional_curvature(chart: &MetricChart, plane: &TangentPlane) -> Result<f64> {
    let jet = chart.metric_jet(&plane.point, chart.is_polar())?;
    let riemann = if chart.is_polar() {
        riemann_from_jet(&jet)
    } else {
        chart.riemann_finite_difference(&plane.point)?
    };
    sectional_from(&jet, &riemann, &plane.u, &plane.v)
}

pub(crate) fn sectional_from(
    jet: &MetricJet,
    riemann: &Riemann,
    u: &[f64],
    v: &[f64],
) -> Result<f64> {
    let uu = jet_inner(jet, u, u);
    let vv = jet_inner(jet, v, v);
    let uv = jet_inner(jet, u, v);
    let gram = uu * vv - uv * uv;
    if !(gram > 1e-14 * uu * vv) {
        return Err(Error::DegeneratePlane(gram / (uu * vv)));
    }
    Ok(riemann.contract(u, v, u, v) / gram)
}

/// Axis-aligned box in chart coordinates.
pub type Region = Vec<(f64, f64)>;

/// Box with radius in `[r_lo, r_hi]`, polar angles kept `1e-3` away from
/// the coordinate poles, and `z` in `[-5, 5]`.
pub fn default_region(chart: &MetricChart, r_lo: f64, r_hi: f64) -> Region {
    let b = chart.base_dim();
    let eps = 1e-3;
    let mut region = Vec::with_capacity(b + 1);
    if chart.is_polar() {
        region.push((r_lo, r_hi));
        for _ in 0..b.saturating_sub(2) {
            region.push((eps, std::f64::consts::PI - eps));
        }
        region.push((0.0, std::f64::consts::TAU));
    } else {
        let half = r_hi / (b as f64).sqrt();
        for _ in 0..b {
            region.push((-half, half));
        }
    }
    region.push((-5.0, 5.0));
    region
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub samples: usize,
    pub seed: u64,
    pub max_k: f64,
    pub min_k: f64,
    pub argmax_point: Vec<f64>,
    pub argmax_u: Vec<f64>,
    pub argmax_v: Vec<f64>,
}

/// Deterministic per-sample RNG stream keyed by `(seed, index)`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn random_plane(
    chart: &MetricChart,
    region: &Region,
    rng: &mut ChaCha8Rng,
) -> Result<TangentPlane> {
    use rand::Rng;
    let d = chart.dim();
    let point: Vec<f64> = region
        .iter()
        .map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>())
        .collect();
    let jet = chart.metric_jet(&point, false)?;
    loop {
        let u: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        let v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        if let Ok(frame) = orthonormalize_with(&jet, &[u, v]) {
            let mut it = frame.into_iter();
            let u = it.next().unwrap();
            let v = it.next().unwrap();
            return Ok(TangentPlane { point, u, v });
        }
    }
}

pub fn scan_nonpositive(
    chart: &MetricChart,
    samples: usize,
    seed: u64,
    region: &Region,
) -> Result<ScanReport> {
    if samples == 0 {
        return Err(Error::InvalidParameter(
            "scan needs at least one sample".into(),
        ));
    }
    if region.len() != chart.dim() {
        return Err(Error::DimensionMismatch(region.len(), chart.dim()));
    }
    let results: Vec<(f64, TangentPlane)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let plane = random_plane(chart, region, &mut rng)?;
            let k = sectional_curvature(chart, &plane)?;
            Ok((k, plane))
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    let mut min_k = f64::INFINITY;
    for (i, (k, _)) in results.iter().enumerate() {
        if *k > results[best].0 {
            best = i;
        }
        min_k = min_k.min(*k);
    }
    let (max_k, plane) = results[best].clone();
    Ok(ScanReport {
        samples,
        seed,
        max_k,
        min_k,
        argmax_point: plane.point,
        argmax_u: plane.u,
        argmax_v: plane.v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn k19() -> WarpingProfile {
        WarpingProfile::interpolated(19.0).unwrap()
    }

    #[test]
    fn flat_cartesian_is_euclidean() {
        let chart = MetricChart::cartesian(1, WarpingProfile::Flat).unwrap();
        let x = [0.3, -2.0, 5.0];
        assert_eq!(chart.metric_tensor(&x).unwrap(), DMatrix::identity(3, 3));
        assert!(chart
            .christoffel(&x)
            .unwrap()
            .data
            .iter()
            .all(|&v| v == 0.0));
        assert_eq!(chart.riemann(&x).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn hyperbolic_polar_metric_and_christoffel() {
        let chart = MetricChart::polar(1, WarpingProfile::Hyperbolic).unwrap();
        let x = [1.0, 0.3, 0.0];
        let g = chart.metric_tensor(&x).unwrap();
        assert!((g[(1, 1)] - 1.381_097_845_541_415).abs() < 1e-12);
        assert!((g[(2, 2)] - 2.381_097_845_541_415).abs() < 1e-12);
        let gamma = chart.christoffel(&x).unwrap();
        assert!((gamma.get(0, 1, 1) + 1.813_430_203_923_509_4).abs() < 1e-12);
    }

    #[test]
    fn polar_rejects_axis() {
        let chart = MetricChart::polar(1, k19()).unwrap();
        assert!(matches!(
            chart.metric_tensor(&[1e-9, 0.0, 0.0]),
            Err(Error::DegeneratePoint(_))
        ));
        let four = MetricChart::four_d(k19());
        assert!(four.metric_tensor(&[1.0, 0.0, 0.2, 0.0]).is_err());
    }

    #[test]
    fn cartesian_metric_is_pullback_of_polar() {
        let p = k19();
        let polar = MetricChart::polar(1, p.clone()).unwrap();
        let cart = MetricChart::cartesian(1, p).unwrap();
        for pt in [
            [0.5, 0.0, 0.0],
            [19.0, 1.1, 2.0],
            [0.04, 2.0, -1.0],
            [40.0, -0.4, 0.0],
        ] {
            let x = polar.to_cartesian(&pt);
            let gc = cart.metric_tensor(&x).unwrap();
            let gp = polar.metric_tensor(&pt).unwrap();
            let jac = coords::polar_jacobian(2, &pt);
            let pulled = jac.transpose() * &gc * &jac;
            let scale = gp.abs().max();
            assert!((pulled - gp).abs().max() <= 1e-12 * scale, "{pt:?}");
        }
    }

    #[test]
    fn christoffel_matches_metric_finite_differences() {
        let chart = MetricChart::polar(1, k19()).unwrap();
        let x = [19.0, 0.7, 0.3];
        let jet = chart.metric_jet(&x, false).unwrap();
        let h = 1e-5;
        for k in 0..3 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let gp = chart.metric_tensor(&xp).unwrap();
            let gm = chart.metric_tensor(&xm).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let fd = (gp[(i, j)] - gm[(i, j)]) / (2.0 * h);
                    let an = jet.dg[(k * 3 + i) * 3 + j];
                    assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn hyperbolic_four_d_component() {
        let chart = MetricChart::four_d(WarpingProfile::Hyperbolic);
        let r = chart.riemann(&[1.0, FRAC_PI_2, 0.4, 0.0]).unwrap();
        assert!((r.get(1, 0, 1, 0) + 1.381_097_845_541_415).abs() < 1e-12);
    }

    #[test]
    fn jet_and_finite_difference_routes_agree() {
        let chart = MetricChart::four_d(k19());
        let x = [19.0, 1.0, 0.5, 0.2];
        let a = chart.riemann(&x).unwrap();
        let b = chart.riemann_finite_difference(&x).unwrap();
        let scale = a.max_abs();
        for (u, v) in a.data.iter().zip(b.data.iter()) {
            assert!((u - v).abs() <= 1e-6 * scale, "{u} vs {v}");
        }
        assert!(a.symmetry_defect() < 1e-9);
    }

    #[test]
    fn closed_form_matches_tensor() {
        let p = k19();
        let chart = MetricChart::four_d(p.clone());
        let (r, th) = (19.0, 1.0);
        let riem = chart.riemann(&[r, th, 0.0, 0.0]).unwrap();
        let cc = curvature_components_closed_form(&p, r, th).unwrap();
        for (&(a, b), v) in CurvatureComponents::INDICES.iter().zip(cc.as_array()) {
            assert!((riem.get(a, b, a, b) - v).abs() <= 1e-8 * v.abs().max(1.0));
        }
    }

    #[test]
    fn flat_closed_form_is_zero() {
        let cc = curvature_components_closed_form(&WarpingProfile::Flat, 2.0, 1.0).unwrap();
        assert!(cc.as_array().iter().all(|&v| v == 0.0));
        assert!(curvature_components_closed_form(&WarpingProfile::Flat, 2.0, PI).is_err());
    }

    #[test]
    fn sectional_is_basis_independent() {
        let chart = MetricChart::polar(2, k19()).unwrap();
        let mut rng = sample_rng(5, 0);
        let region = default_region(&chart, 0.5, 30.0);
        let plane = random_plane(&chart, &region, &mut rng).unwrap();
        let k1 = sectional_curvature(&chart, &plane).unwrap();
        let u2: Vec<f64> = plane
            .u
            .iter()
            .zip(&plane.v)
            .map(|(a, b)| 2.0 * a - 0.3 * b)
            .collect();
        let v2: Vec<f64> = plane
            .u
            .iter()
            .zip(&plane.v)
            .map(|(a, b)| 0.7 * a + 5.0 * b)
            .collect();
        let k2 = sectional_curvature(
            &chart,
            &TangentPlane {
                point: plane.point.clone(),
                u: u2,
                v: v2,
            },
        )
        .unwrap();
        assert!((k1 - k2).abs() <= 1e-9 * k1.abs().max(1e-3));
    }

    #[test]
    fn degenerate_plane_rejected() {
        let chart = MetricChart::polar(1, WarpingProfile::Hyperbolic).unwrap();
        let plane = TangentPlane {
            point: vec![1.0, 0.0, 0.0],
            u: vec![1.0, 0.0, 0.0],
            v: vec![2.0, 0.0, 0.0],
        };
        assert!(matches!(
            sectional_curvature(&chart, &plane),
            Err(Error::DegeneratePlane(_))
        ));
    }

    #[test]
    fn flat_scan_is_zero() {
        let chart = MetricChart::cartesian(1, WarpingProfile::Flat).unwrap();
        let region = default_region(&chart, 0.0, 10.0);
        let rep = scan_nonpositive(&chart, 1000, 1, &region).unwrap();
        assert!(rep.max_k.abs() <= 1e-12 && rep.min_k.abs() <= 1e-12);
    }

    #[test]
    fn scan_is_deterministic() {
        let chart = MetricChart::four_d(k19());
        let region = default_region(&chart, 1e-3, 45.0);
        let a = scan_nonpositive(&chart, 200, 42, &region).unwrap();
        let b = scan_nonpositive(&chart, 200, 42, &region).unwrap();
        assert_eq!(a, b);
    }
}
