//! The twisted cylinder: the warped metric on `R^{2n} x R` modulo the deck
//! transformation `(x, z) -> (rho x, z + l)`.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::{self, ChartPolicy, PhaseState};
use crate::geometry::{jet_inner, ChartKind, MetricChart};
use crate::profiles::WarpingProfile;

pub const DEFAULT_CLOSE_TOL: f64 = 1e-6;
pub const DEFAULT_S_MAX: u64 = 10_000;
/// Curvature along an orbit is sampled every this many integration steps.
const CURVATURE_STRIDE: usize = 10;

/// Block-diagonal rotation of `R^{2n}` by the angles `alpha_1, .., alpha_n`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RotationBlock {
    pub angles: Vec<f64>,
}

impl RotationBlock {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidParameter(
                "rotation needs at least one angle".into(),
            ));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter(
                "rotation angles must be finite".into(),
            ));
        }
        Ok(Self { angles })
    }

    pub fn dim(&self) -> usize {
        2 * self.angles.len()
    }

    pub fn power(&self, s: i64) -> Self {
        Self {
            angles: self.angles.iter().map(|a| a * s as f64).collect(),
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (j, a) in self.angles.iter().enumerate() {
            let (s, c) = a.sin_cos();
            m[(2 * j, 2 * j)] = c;
            m[(2 * j, 2 * j + 1)] = -s;
            m[(2 * j + 1, 2 * j)] = s;
            m[(2 * j + 1, 2 * j + 1)] = c;
        }
        m
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = x.to_vec();
        for (j, a) in self.angles.iter().enumerate() {
            let (s, c) = a.sin_cos();
            let (u, v) = (x[2 * j], x[2 * j + 1]);
            out[2 * j] = c * u - s * v;
            out[2 * j + 1] = s * u + c * v;
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct TwistedCylinder {
    pub n: usize,
    pub length: f64,
    pub rho: RotationBlock,
    pub profile: WarpingProfile,
}

impl TwistedCylinder {
    pub fn new(length: f64, rho: RotationBlock, profile: WarpingProfile) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::NonpositiveLength(length));
        }
        Ok(Self {
            n: rho.angles.len(),
            length,
            rho,
            profile,
        })
    }

    /// Cartesian chart of the universal cover.
    pub fn chart(&self) -> MetricChart {
        MetricChart {
            n: self.n,
            profile: self.profile.clone(),
            kind: ChartKind::Cartesian,
        }
    }

    pub fn flat_radius(&self) -> f64 {
        self.profile.flat_radius()
    }
}

/// Larger root `lambda = e^{l/2}` of `t^2 - 2 cosh(l/2) t + 1`.
pub fn translation_length_root(length: f64) -> Result<f64> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::NonpositiveLength(length));
    }
    let lambda = (0.5 * length).cosh() + (0.5 * length).sinh();
    if lambda <= 1.0 {
        return Err(Error::NonpositiveLength(length));
    }
    Ok(lambda)
}

/// `g^s (x, z) = (rho^s x, z + s l)` on Cartesian coordinates.
pub fn apply_deck(cyl: &TwistedCylinder, point: &[f64], s: i64) -> Result<Vec<f64>> {
    let b = cyl.rho.dim();
    if point.len() != b + 1 {
        return Err(Error::DimensionMismatch(point.len(), b + 1));
    }
    let mut out = cyl.rho.power(s).apply(&point[..b]);
    out.push(point[b] + s as f64 * cyl.length);
    Ok(out)
}

/// Largest entry of `D^T g(g^s p) D - g(p)`, relative to the largest entry
/// of `g(p)`, where `D` is the differential of the deck map.
pub fn deck_pullback_defect(cyl: &TwistedCylinder, point: &[f64], s: i64) -> Result<f64> {
    let chart = cyl.chart();
    let d = chart.dim();
    let image = apply_deck(cyl, point, s)?;
    let g = chart.metric_tensor(point)?;
    let gi = chart.metric_tensor(&image)?;
    let mut diff = DMatrix::identity(d, d);
    diff.view_mut((0, 0), (d - 1, d - 1))
        .copy_from(&cyl.rho.power(s).matrix());
    let pulled = diff.transpose() * gi * diff;
    let scale = g.amax();
    Ok((pulled - &g).amax() / scale)
}

/// Holonomy of the core geodesic traversed `s` times: transport an
/// orthonormal normal frame from the base point down the axis for time `s l`
/// and carry it back with the differential of `g^s`. The result acts on the
/// normal space `R^{2n}`.
pub fn core_holonomy_power(cyl: &TwistedCylinder, s: u64, step: f64) -> Result<DMatrix<f64>> {
    let chart = cyl.chart();
    let b = cyl.rho.dim();
    let d = b + 1;
    let mut velocity = vec![0.0; d];
    velocity[b] = -1.0;
    let start = PhaseState::new(vec![0.0; d], velocity);
    let path = flow::integrate_with_policy(
        &chart,
        &start,
        s as f64 * cyl.length,
        step,
        ChartPolicy::Switching,
    )?;
    let frame: Vec<Vec<f64>> = (0..b)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            e
        })
        .collect();
    let transported = flow::parallel_transport(&path, &frame)?;
    if transported.kind != ChartKind::Cartesian {
        return Err(Error::ChartExit {
            chart: "cartesian",
            t: path.duration(),
        });
    }
    let back = cyl.rho.power(s as i64);
    let mut m = DMatrix::zeros(b, b);
    for (j, w) in transported.frame.iter().enumerate() {
        for (i, c) in back.apply(&w[..b]).into_iter().enumerate() {
            m[(i, j)] = c;
        }
    }
    Ok(m)
}

pub fn core_holonomy(cyl: &TwistedCylinder) -> Result<DMatrix<f64>> {
    core_holonomy_power(cyl, 1, flow::DEFAULT_STEP)
}

/// `min_j |s alpha_j|` reduced to `[0, pi]`.
pub fn angular_defect(rho: &RotationBlock, s: u64) -> f64 {
    rho.angles
        .iter()
        .map(|a| wrap_angle(s as f64 * a).abs())
        .fold(f64::INFINITY, f64::min)
}

fn wrap_angle(a: f64) -> f64 {
    a - TAU * (a / TAU).round()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenObstructionReport {
    pub s_max: u64,
    pub tol: f64,
    /// `values[s - 1]` is the distance of `rho^s` from having eigenvalue one.
    pub values: Vec<f64>,
    pub flagged: Vec<u64>,
    pub min_value: f64,
    pub argmin: u64,
}

pub fn eigen_obstruction(
    rho: &RotationBlock,
    s_max: u64,
    tol: f64,
) -> Result<EigenObstructionReport> {
    if s_max == 0 {
        return Err(Error::InvalidParameter("s_max must be at least 1".into()));
    }
    let values: Vec<f64> = (1..=s_max)
        .into_par_iter()
        .map(|s| angular_defect(rho, s))
        .collect();
    let flagged = (1..=s_max)
        .filter(|&s| values[s as usize - 1] < tol)
        .collect();
    let (argmin, min_value) = argmin(&values);
    Ok(EigenObstructionReport {
        s_max,
        tol,
        values,
        flagged,
        min_value,
        argmin,
    })
}

/// First index (1-based) of the smallest value.
fn argmin(values: &[f64]) -> (u64, f64) {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] {
            best = i;
        }
    }
    (best as u64 + 1, values[best])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClosingReport {
    pub r0: f64,
    pub start: Vec<f64>,
    pub s_max: u64,
    pub close_tol: f64,
    /// `distances[s - 1]` is the return distance after `s` periods.
    pub distances: Vec<f64>,
    pub min_distance: f64,
    pub argmin: u64,
    pub closed: Vec<u64>,
}

/// Axis-parallel orbits through `x0` with `|x0| = r0`, split equally over the
/// rotation blocks. Inside the flat tube the orbit is the line `(x0, t)` and
/// returns after `s` periods at flat distance `|rho^s x0 - x0|`.
pub fn closing_scan(
    cyl: &TwistedCylinder,
    r0: f64,
    s_max: u64,
    close_tol: f64,
) -> Result<ClosingReport> {
    if r0 < 0.0 || r0.is_nan() {
        return Err(Error::NegativeRadius(r0));
    }
    let tube = cyl.flat_radius();
    if r0 >= tube {
        return Err(Error::RadiusOutsideTube { radius: r0, tube });
    }
    if s_max == 0 {
        return Err(Error::InvalidParameter("s_max must be at least 1".into()));
    }
    let b = cyl.rho.dim();
    let mut start = vec![0.0; b + 1];
    let per_block = r0 / (cyl.n as f64).sqrt();
    for j in 0..cyl.n {
        start[2 * j] = per_block;
    }
    let distances: Vec<f64> = (1..=s_max)
        .into_par_iter()
        .map(|s| {
            let image = cyl.rho.power(s as i64).apply(&start[..b]);
            image
                .iter()
                .zip(&start[..b])
                .map(|(a, c)| (a - c) * (a - c))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    let closed = (1..=s_max)
        .filter(|&s| distances[s as usize - 1] < close_tol)
        .collect();
    let (argmin, min_distance) = argmin(&distances);
    Ok(ClosingReport {
        r0,
        start,
        s_max,
        close_tol,
        distances,
        min_distance,
        argmin,
        closed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipReport {
    pub inside: bool,
    pub max_radius: f64,
    /// Largest `|K(v, w)|` over normal directions `w`, sampled along the orbit.
    pub max_curvature: f64,
    /// First time the orbit leaves the flat tube, linearly interpolated
    /// between samples.
    pub exit_time: Option<f64>,
    pub integrated_until: f64,
}

/// Largest absolute eigenvalue of the Jacobi operator `w -> R(w, v) v` on
/// the normal space of a unit vector `v`.
pub fn jacobi_operator_norm(chart: &MetricChart, state: &PhaseState) -> Result<f64> {
    let frame = flow::normal_frame(chart, &state.position, &state.velocity)?;
    let riemann = chart.riemann(&state.position)?;
    let jet = chart.metric_jet(&state.position, false)?;
    let vv = jet_inner(&jet, &state.velocity, &state.velocity);
    let q = frame.len();
    let mut m = DMatrix::zeros(q, q);
    for a in 0..q {
        for b in 0..q {
            m[(a, b)] =
                riemann.contract(&frame[a], &state.velocity, &frame[b], &state.velocity) / vv;
        }
    }
    let sym = (&m + m.transpose()) * 0.5;
    Ok(SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, e| acc.max(e.abs())))
}

/// Follows the orbit of a Cartesian `state` for time `t_end` (the metric is
/// invariant under the deck group, so the orbit in the cover suffices) and
/// decides whether it stays in the flat tube. Integration stops at the first
/// sample outside the tube.
pub fn singular_membership(
    cyl: &TwistedCylinder,
    state: &PhaseState,
    t_end: f64,
    step: f64,
) -> Result<MembershipReport> {
    let chart = cyl.chart();
    let tube = cyl.flat_radius();
    chart.validate(&state.position)?;
    if state.velocity.len() != chart.dim() {
        return Err(Error::DimensionMismatch(state.velocity.len(), chart.dim()));
    }
    let mut state = state.clone();
    let mut kind = ChartKind::Cartesian;
    let mut t = 0.0;
    let mut max_radius = chart.radius(&state.position);
    let mut max_curvature = jacobi_operator_norm(&chart, &state)?;
    let mut exit_time = if max_radius > tube { Some(0.0) } else { None };
    let chunk = CURVATURE_STRIDE as f64 * step;
    while exit_time.is_none() && t < t_end - 1e-12 {
        let span = chunk.min(t_end - t);
        let here = chart.with_kind(kind);
        let path = flow::integrate_with_policy(&here, &state, span, step, ChartPolicy::Switching)?;
        let mut prev_r = here.radius(&state.position);
        for (i, sample) in path.samples.iter().enumerate().skip(1) {
            let r = chart.with_kind(sample.kind).radius(&sample.state.position);
            max_radius = max_radius.max(r);
            if r > tube {
                let frac = (tube - prev_r) / (r - prev_r);
                exit_time =
                    Some(t + path.samples[i - 1].t + frac * (sample.t - path.samples[i - 1].t));
                let outside = chart.with_kind(sample.kind);
                max_curvature = max_curvature.max(jacobi_operator_norm(&outside, &sample.state)?);
                t += sample.t;
                break;
            }
            prev_r = r;
        }
        if exit_time.is_none() {
            let end = path.end();
            kind = end.kind;
            state = end.state.clone();
            t += end.t;
            max_curvature =
                max_curvature.max(jacobi_operator_norm(&chart.with_kind(kind), &state)?);
        }
    }
    Ok(MembershipReport {
        inside: exit_time.is_none() && max_curvature <= 1e-10,
        max_radius,
        max_curvature,
        exit_time,
        integrated_until: t,
    })
}
