//! Geodesics, parallel transport and the Riccati equation for unstable
//! Jacobi fields, by classical fixed-step RK4.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::coords::{cartesian_vector_to_polar, polar_vector_to_cartesian};
use crate::geometry::{
    christoffel_from_jet, jet_inner, riemann_from_jet, ChartKind, MetricChart, MetricJet,
};

pub const DEFAULT_STEP: f64 = 1e-3;
/// Fixed polar integration stops this close to the axis or to an angular pole.
pub const POLAR_EXIT_CLEARANCE: f64 = 1e-2;
/// Switching integration moves to the Cartesian chart below this radius and
/// back above `RETURN_RADIUS`.
pub const SWITCH_RADIUS: f64 = 0.5;
const RETURN_RADIUS: f64 = 1.0;
const SWITCH_SINE: f64 = 1e-2;
const RETURN_SINE: f64 = 2e-2;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhaseState {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
}

impl PhaseState {
    pub fn new(position: Vec<f64>, velocity: Vec<f64>) -> Self {
        Self { position, velocity }
    }

    pub fn reversed(&self) -> Self {
        Self {
            position: self.position.clone(),
            velocity: self.velocity.iter().map(|v| -v).collect(),
        }
    }
}

/// Whether integration may leave the starting chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChartPolicy {
    Fixed,
    /// Cartesian near the axis, polar elsewhere.
    Switching,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathSample {
    pub t: f64,
    pub kind: ChartKind,
    pub state: PhaseState,
}

#[derive(Clone, Debug)]
pub struct GeodesicPath {
    pub samples: Vec<PathSample>,
    pub step: f64,
    pub chart: MetricChart,
    pub policy: ChartPolicy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransportResult {
    pub kind: ChartKind,
    pub position: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
    /// Largest deviation of a pairwise inner product from its initial value,
    /// over every step, relative to the initial lengths.
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RiccatiResult {
    pub t: f64,
    /// `U(t)` in the parallel orthonormal frame of the normal space.
    pub u: DMatrix<f64>,
    /// Normal frame at the end point, in the chart of the end sample.
    pub frame: Vec<Vec<f64>>,
    pub kind: ChartKind,
    /// `(t, trace U(t))` at every step.
    pub trace: Vec<(f64, f64)>,
}

pub fn energy(chart: &MetricChart, state: &PhaseState) -> Result<f64> {
    chart.inner(&state.position, &state.velocity, &state.velocity)
}

/// Rescales the velocity to unit length.
pub fn normalize(chart: &MetricChart, state: &PhaseState) -> Result<PhaseState> {
    let e = energy(chart, state)?;
    if !(e > 0.0) {
        return Err(Error::InvalidParameter("zero initial velocity".into()));
    }
    let s = e.sqrt();
    Ok(PhaseState::new(
        state.position.clone(),
        state.velocity.iter().map(|v| v / s).collect(),
    ))
}

impl GeodesicPath {
    pub fn start(&self) -> &PathSample {
        &self.samples[0]
    }

    pub fn end(&self) -> &PathSample {
        self.samples.last().expect("path has at least one sample")
    }

    pub fn duration(&self) -> f64 {
        self.end().t - self.start().t
    }

    pub fn chart_at(&self, i: usize) -> MetricChart {
        self.chart.with_kind(self.samples[i].kind)
    }

    /// Sample `i` expressed in the chart of the start sample.
    pub fn state_in_start_chart(&self, i: usize) -> Result<PhaseState> {
        let sample = &self.samples[i];
        let y = [sample.state.position.clone(), sample.state.velocity.clone()].concat();
        let y = convert(&self.chart, sample.kind, self.start().kind, &y, 2)?;
        Ok(PhaseState::new(
            y[..y.len() / 2].to_vec(),
            y[y.len() / 2..].to_vec(),
        ))
    }

    pub fn end_in_start_chart(&self) -> Result<PhaseState> {
        self.state_in_start_chart(self.samples.len() - 1)
    }

    pub fn energies(&self) -> Result<Vec<f64>> {
        (0..self.samples.len())
            .map(|i| energy(&self.chart_at(i), &self.samples[i].state))
            .collect()
    }

    /// `max_t |g(v, v) - g(v, v)|_{t=0}|`.
    pub fn energy_drift(&self) -> Result<f64> {
        let e = self.energies()?;
        Ok(e.iter().fold(0.0f64, |m, x| m.max((x - e[0]).abs())))
    }

    /// Columns `t`, position, velocity, energy; every row in the chart of the
    /// start sample.
    pub fn to_csv(&self) -> Result<String> {
        let d = self.chart.dim();
        let mut out = String::from("t");
        for i in 0..d {
            out.push_str(&format!(",x{i}"));
        }
        for i in 0..d {
            out.push_str(&format!(",v{i}"));
        }
        out.push_str(",energy\n");
        let energies = self.energies()?;
        for (i, (s, e)) in self.samples.iter().zip(energies).enumerate() {
            let state = self.state_in_start_chart(i)?;
            out.push_str(&format!("{:.16e}", s.t));
            for c in state.position.iter().chain(state.velocity.iter()) {
                out.push_str(&format!(",{c:.16e}"));
            }
            out.push_str(&format!(",{e:.16e}\n"));
        }
        Ok(out)
    }
}

/// State layout: position, velocity, `vectors` transported vectors and,
/// when `riccati`, a `(d-1) x (d-1)` matrix whose frame is the first `d-1`
/// transported vectors.
#[derive(Clone, Copy)]
struct Layout {
    d: usize,
    vectors: usize,
    riccati: bool,
}

impl Layout {
    fn q(&self) -> usize {
        self.d - 1
    }

    fn vector_count(&self) -> usize {
        2 + self.vectors
    }

    fn len(&self) -> usize {
        self.d * self.vector_count() + if self.riccati { self.q() * self.q() } else { 0 }
    }
}

fn rhs(chart: &MetricChart, y: &[f64], layout: Layout) -> Result<Vec<f64>> {
    let d = layout.d;
    let x = &y[..d];
    let v = &y[d..2 * d];
    let polar = chart.is_polar();
    let jet = chart.metric_jet(x, layout.riccati && polar)?;
    let gamma = christoffel_from_jet(&jet);
    let mut dy = vec![0.0; layout.len()];
    dy[..d].copy_from_slice(v);
    let acc = gamma.contract(v, v);
    for i in 0..d {
        dy[d + i] = -acc[i];
    }
    for a in 0..layout.vectors {
        let off = (2 + a) * d;
        let dw = gamma.contract(v, &y[off..off + d]);
        for i in 0..d {
            dy[off + i] = -dw[i];
        }
    }
    if layout.riccati {
        let q = layout.q();
        let riemann = if polar {
            riemann_from_jet(&jet)
        } else {
            chart.riemann_finite_difference(x)?
        };
        let frame: Vec<&[f64]> = (0..q).map(|a| &y[(2 + a) * d..(3 + a) * d]).collect();
        let off = d * layout.vector_count();
        let u = &y[off..off + q * q];
        for a in 0..q {
            for b in 0..q {
                let mut uu = 0.0;
                for c in 0..q {
                    uu += u[a * q + c] * u[c * q + b];
                }
                let rv = riemann.contract(frame[a], v, frame[b], v);
                dy[off + a * q + b] = -uu - rv;
            }
        }
    }
    Ok(dy)
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

fn rk4_step(chart: &MetricChart, y: &[f64], h: f64, layout: Layout) -> Result<Vec<f64>> {
    let k1 = rhs(chart, y, layout)?;
    let k2 = rhs(chart, &axpy(y, 0.5 * h, &k1), layout)?;
    let k3 = rhs(chart, &axpy(y, 0.5 * h, &k2), layout)?;
    let k4 = rhs(chart, &axpy(y, h, &k3), layout)?;
    Ok((0..y.len())
        .map(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect())
}

/// Re-expresses the point and the first `vectors` tangent vectors of `y`
/// (position counts as one) in another chart of the same metric.
fn convert(
    base: &MetricChart,
    from: ChartKind,
    to: ChartKind,
    y: &[f64],
    vectors: usize,
) -> Result<Vec<f64>> {
    if from == to {
        return Ok(y.to_vec());
    }
    let d = base.dim();
    let b = base.base_dim();
    let mut out = y.to_vec();
    match (from, to) {
        (ChartKind::Polar, ChartKind::Cartesian) => {
            let p = &y[..d];
            out[..d].copy_from_slice(&base.with_kind(ChartKind::Polar).to_cartesian(p));
            for a in 1..vectors {
                let w = polar_vector_to_cartesian(b, p, &y[a * d..(a + 1) * d]);
                out[a * d..(a + 1) * d].copy_from_slice(&w);
            }
        }
        (ChartKind::Cartesian, ChartKind::Polar) => {
            let p = base.with_kind(ChartKind::Polar).from_cartesian(&y[..d]);
            for a in 1..vectors {
                let w = cartesian_vector_to_polar(b, &p, &y[a * d..(a + 1) * d])
                    .ok_or_else(|| Error::DegeneratePoint("polar chart is singular here".into()))?;
                out[a * d..(a + 1) * d].copy_from_slice(&w);
            }
            out[..d].copy_from_slice(&p);
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "cannot convert {} to {}",
                from.name(),
                to.name()
            )))
        }
    }
    Ok(out)
}

/// Distance to the axis and smallest sine of a restricted polar angle.
fn polar_clearance(base: &MetricChart, kind: ChartKind, x: &[f64]) -> (f64, f64) {
    let b = base.base_dim();
    let p = if kind == ChartKind::Cartesian {
        base.with_kind(ChartKind::Polar).from_cartesian(x)
    } else {
        x.to_vec()
    };
    let sine = p[1..b - 1].iter().fold(1.0f64, |m, a| m.min(a.sin().abs()));
    (p[0], sine)
}

struct Integrator<'a> {
    base: &'a MetricChart,
    policy: ChartPolicy,
    layout: Layout,
}

impl Integrator<'_> {
    fn new(base: &MetricChart, policy: ChartPolicy, layout: Layout) -> Result<Integrator<'_>> {
        if policy == ChartPolicy::Switching && base.kind == ChartKind::FourDModel {
            return Err(Error::InvalidParameter(
                "the four-d model chart has no Cartesian partner".into(),
            ));
        }
        Ok(Integrator {
            base,
            policy,
            layout,
        })
    }

    fn choose(&self, kind: ChartKind, y: &[f64], t: f64) -> Result<ChartKind> {
        if kind == ChartKind::Cartesian && self.policy == ChartPolicy::Fixed {
            return Ok(kind);
        }
        let (r, sine) = polar_clearance(self.base, kind, &y[..self.layout.d]);
        match (kind, self.policy) {
            (ChartKind::Cartesian, _) => Ok(if r > RETURN_RADIUS && sine > RETURN_SINE {
                ChartKind::Polar
            } else {
                kind
            }),
            (_, ChartPolicy::Fixed) if r.min(sine) < POLAR_EXIT_CLEARANCE => {
                Err(Error::ChartExit {
                    chart: kind.name(),
                    t,
                })
            }
            (ChartKind::Polar, ChartPolicy::Switching)
                if r < SWITCH_RADIUS || sine < SWITCH_SINE =>
            {
                Ok(ChartKind::Cartesian)
            }
            _ => Ok(kind),
        }
    }

    /// Integrates from `t0` for `steps` steps of size `h`, calling `observe`
    /// after each step (and once at the start).
    fn run(
        &self,
        kind0: ChartKind,
        y0: Vec<f64>,
        t0: f64,
        h: f64,
        steps: usize,
        mut observe: impl FnMut(f64, ChartKind, &[f64]) -> Result<()>,
    ) -> Result<(ChartKind, Vec<f64>)> {
        let mut kind = kind0;
        let mut y = y0;
        let converted = self.layout.vector_count();
        observe(t0, kind, &y)?;
        for i in 0..steps {
            let t = t0 + i as f64 * h;
            let next = self.choose(kind, &y, t)?;
            if next != kind {
                y = convert(self.base, kind, next, &y, converted)?;
                kind = next;
            }
            let chart = self.base.with_kind(kind);
            y = rk4_step(&chart, &y, h, self.layout).map_err(|e| match e {
                Error::DegeneratePoint(_) => Error::ChartExit {
                    chart: kind.name(),
                    t,
                },
                other => other,
            })?;
            if y.iter().any(|c| !c.is_finite()) {
                return Err(Error::ChartExit {
                    chart: kind.name(),
                    t,
                });
            }
            observe(t0 + (i + 1) as f64 * h, kind, &y)?;
        }
        Ok((kind, y))
    }
}

fn step_count(t_end: f64, step: f64) -> Result<(usize, f64)> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "step must be positive, got {step}"
        )));
    }
    if !(t_end >= 0.0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "integration time must be nonnegative, got {t_end}"
        )));
    }
    let n = (t_end / step - 1e-9).ceil().max(0.0) as usize;
    Ok(if n == 0 {
        (0, step)
    } else {
        (n, t_end / n as f64)
    })
}

fn check_state(chart: &MetricChart, state: &PhaseState) -> Result<()> {
    let d = chart.dim();
    if state.velocity.len() != d {
        return Err(Error::DimensionMismatch(state.velocity.len(), d));
    }
    chart.validate(&state.position)
}

/// Geodesic in a single chart; leaving the chart's valid region (for polar
/// charts: within `POLAR_EXIT_CLEARANCE` of the axis or an angular pole) is
/// an error.
pub fn integrate_geodesic(
    chart: &MetricChart,
    state0: &PhaseState,
    t_end: f64,
    step: f64,
) -> Result<GeodesicPath> {
    integrate_with_policy(chart, state0, t_end, step, ChartPolicy::Fixed)
}

/// Geodesic that moves between the polar and Cartesian charts as needed;
/// `state0` is given in `chart`.
pub fn integrate_geodesic_switching(
    chart: &MetricChart,
    state0: &PhaseState,
    t_end: f64,
    step: f64,
) -> Result<GeodesicPath> {
    integrate_with_policy(chart, state0, t_end, step, ChartPolicy::Switching)
}

pub fn integrate_with_policy(
    chart: &MetricChart,
    state0: &PhaseState,
    t_end: f64,
    step: f64,
    policy: ChartPolicy,
) -> Result<GeodesicPath> {
    check_state(chart, state0)?;
    let (steps, h) = step_count(t_end, step)?;
    let d = chart.dim();
    let layout = Layout {
        d,
        vectors: 0,
        riccati: false,
    };
    let integrator = Integrator::new(chart, policy, layout)?;
    let mut samples = Vec::with_capacity(steps + 1);
    let y0 = [state0.position.clone(), state0.velocity.clone()].concat();
    integrator.run(chart.kind, y0, 0.0, h, steps, |t, kind, y| {
        samples.push(PathSample {
            t,
            kind,
            state: PhaseState::new(y[..d].to_vec(), y[d..2 * d].to_vec()),
        });
        Ok(())
    })?;
    Ok(GeodesicPath {
        samples,
        step: h,
        chart: chart.clone(),
        policy,
    })
}

/// Integrates many orbits in parallel; results are in input order.
pub fn integrate_many(
    chart: &MetricChart,
    states: &[PhaseState],
    t_end: f64,
    step: f64,
    policy: ChartPolicy,
) -> Vec<Result<GeodesicPath>> {
    states
        .par_iter()
        .map(|s| integrate_with_policy(chart, s, t_end, step, policy))
        .collect()
}

fn gram(jet: &MetricJet, vectors: &[&[f64]]) -> Vec<f64> {
    let m = vectors.len();
    let mut out = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let v = jet_inner(jet, vectors[a], vectors[b]);
            out[a * m + b] = v;
            out[b * m + a] = v;
        }
    }
    out
}

/// `max |G_ab - G0_ab| / sqrt(G0_aa G0_bb)`; the plain deviation for
/// orthonormal frames.
fn gram_defect(g: &[f64], g0: &[f64], m: usize) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            let scale = (g0[a * m + a] * g0[b * m + b]).sqrt();
            worst = worst.max((g[a * m + b] - g0[a * m + b]).abs() / scale);
        }
    }
    worst
}

/// Parallel transport of `frame` (based at the path start, in the start
/// chart) along a geodesic path, integrated jointly with the geodesic.
pub fn parallel_transport(path: &GeodesicPath, frame: &[Vec<f64>]) -> Result<TransportResult> {
    let d = path.chart.dim();
    if let Some(w) = frame.iter().find(|w| w.len() != d) {
        return Err(Error::DimensionMismatch(w.len(), d));
    }
    let start = path.start();
    let layout = Layout {
        d,
        vectors: frame.len(),
        riccati: false,
    };
    let integrator = Integrator::new(&path.chart, path.policy, layout)?;
    let mut y0 = [start.state.position.clone(), start.state.velocity.clone()].concat();
    for w in frame {
        y0.extend_from_slice(w);
    }
    let steps = path.samples.len() - 1;
    let m = frame.len();
    let mut initial: Option<Vec<f64>> = None;
    let mut defect = 0.0f64;
    let (kind, y) = integrator.run(start.kind, y0, start.t, path.step, steps, |_, kind, y| {
        let jet = path.chart.with_kind(kind).metric_jet(&y[..d], false)?;
        let vecs: Vec<&[f64]> = (0..m).map(|a| &y[(2 + a) * d..(3 + a) * d]).collect();
        let g = gram(&jet, &vecs);
        match &initial {
            None => initial = Some(g),
            Some(g0) => defect = defect.max(gram_defect(&g, g0, m)),
        }
        Ok(())
    })?;
    Ok(TransportResult {
        kind,
        position: y[..d].to_vec(),
        frame: (0..m)
            .map(|a| y[(2 + a) * d..(3 + a) * d].to_vec())
            .collect(),
        defect,
    })
}

/// Parallel transport along a prescribed curve `t -> (x(t), x'(t))` in a
/// single chart, for `t` in `[0, t_end]`.
pub fn parallel_transport_along<F>(
    chart: &MetricChart,
    curve: F,
    t_end: f64,
    step: f64,
    frame: &[Vec<f64>],
) -> Result<TransportResult>
where
    F: Fn(f64) -> (Vec<f64>, Vec<f64>),
{
    let d = chart.dim();
    let (steps, h) = step_count(t_end, step)?;
    let m = frame.len();
    if let Some(w) = frame.iter().find(|w| w.len() != d) {
        return Err(Error::DimensionMismatch(w.len(), d));
    }
    let field = |t: f64, w: &[f64]| -> Result<Vec<f64>> {
        let (x, v) = curve(t);
        let gamma = chart.christoffel(&x)?;
        let mut out = Vec::with_capacity(m * d);
        for a in 0..m {
            out.extend(
                gamma
                    .contract(&v, &w[a * d..(a + 1) * d])
                    .into_iter()
                    .map(|c| -c),
            );
        }
        Ok(out)
    };
    let mut w: Vec<f64> = frame.concat();
    let gram_at = |t: f64, w: &[f64]| -> Result<Vec<f64>> {
        let jet = chart.metric_jet(&curve(t).0, false)?;
        let vecs: Vec<&[f64]> = (0..m).map(|a| &w[a * d..(a + 1) * d]).collect();
        Ok(gram(&jet, &vecs))
    };
    let g0 = gram_at(0.0, &w)?;
    let mut defect = 0.0f64;
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = field(t, &w)?;
        let k2 = field(t + 0.5 * h, &axpy(&w, 0.5 * h, &k1))?;
        let k3 = field(t + 0.5 * h, &axpy(&w, 0.5 * h, &k2))?;
        let k4 = field(t + h, &axpy(&w, h, &k3))?;
        for j in 0..w.len() {
            w[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        defect = defect.max(gram_defect(&gram_at(t + h, &w)?, &g0, m));
    }
    Ok(TransportResult {
        kind: chart.kind,
        position: curve(steps as f64 * h).0,
        frame: (0..m).map(|a| w[a * d..(a + 1) * d].to_vec()).collect(),
        defect,
    })
}

/// Orthonormal basis of the orthogonal complement of `v` at `x`.
pub fn normal_frame(chart: &MetricChart, x: &[f64], v: &[f64]) -> Result<Vec<Vec<f64>>> {
    let d = chart.dim();
    let jet = chart.metric_jet(x, false)?;
    let vv = jet_inner(&jet, v, v);
    if !(vv > 0.0) {
        return Err(Error::InvalidParameter("zero velocity".into()));
    }
    let mut basis: Vec<Vec<f64>> = vec![v.iter().map(|c| c / vv.sqrt()).collect()];
    for i in 0..d {
        if basis.len() == d {
            break;
        }
        let mut w = vec![0.0; d];
        w[i] = 1.0;
        let orig = jet_inner(&jet, &w, &w);
        for e in &basis {
            let c = jet_inner(&jet, &w, e);
            for (wi, ei) in w.iter_mut().zip(e) {
                *wi -= c * ei;
            }
        }
        let n2 = jet_inner(&jet, &w, &w);
        if n2 > 1e-6 * orig {
            let n = n2.sqrt();
            basis.push(w.iter().map(|c| c / n).collect());
        }
    }
    Ok(basis.split_off(1))
}

/// Integrates `U' + U^2 + R_v = 0`, `U(0) = c0 I`, along the first `t_end`
/// of `path`, where `R_v[a][b] = R(e_a, v, e_b, v)` in a parallel orthonormal
/// frame of the normal space. Fails once an eigenvalue of `U` exceeds
/// `1 / step` in magnitude.
pub fn riccati_expansion(path: &GeodesicPath, c0: f64, t_end: f64) -> Result<RiccatiResult> {
    if !c0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "initial value must be finite, got {c0}"
        )));
    }
    if !(t_end >= 0.0) || t_end > path.duration() + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "time {t_end} outside the path's [0, {}]",
            path.duration()
        )));
    }
    let d = path.chart.dim();
    let q = d - 1;
    let start = path.start();
    let chart0 = path.chart_at(0);
    let frame = normal_frame(&chart0, &start.state.position, &start.state.velocity)?;
    let layout = Layout {
        d,
        vectors: q,
        riccati: true,
    };
    let integrator = Integrator::new(&path.chart, path.policy, layout)?;
    let mut y0 = [start.state.position.clone(), start.state.velocity.clone()].concat();
    for w in &frame {
        y0.extend_from_slice(w);
    }
    for a in 0..q {
        for b in 0..q {
            y0.push(if a == b { c0 } else { 0.0 });
        }
    }
    let steps = (t_end / path.step).round() as usize;
    let limit = 1.0 / path.step;
    let off = d * layout.vector_count();
    let mut trace = Vec::with_capacity(steps + 1);
    let (kind, y) = integrator.run(start.kind, y0, start.t, path.step, steps, |t, _, y| {
        let u = DMatrix::from_row_slice(q, q, &y[off..]);
        let sym = (&u + u.transpose()) * 0.5;
        let radius = SymmetricEigen::new(sym)
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, e| m.max(e.abs()));
        if !(radius <= limit) {
            return Err(Error::RiccatiBlowUp { t, radius });
        }
        trace.push((t, u.trace()));
        Ok(())
    })?;
    Ok(RiccatiResult {
        t: start.t + steps as f64 * path.step,
        u: DMatrix::from_row_slice(q, q, &y[off..]),
        frame: (0..q)
            .map(|a| y[(2 + a) * d..(3 + a) * d].to_vec())
            .collect(),
        kind,
        trace,
    })
}
