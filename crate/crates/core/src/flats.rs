//! Euclidean pieces of the closing argument for fat flats: Hausdorff
//! distance between compact sets, the volume of `Y` united with an
//! isometric copy, and thickening two crossing strips into a wider box.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::sample_rng;

pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
const INSIDE_TOL: f64 = 1e-12;

/// Finite sample of a compact set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointCloud {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidParameter(
                "point cloud must be nonempty".into(),
            ));
        };
        let dim = first.len();
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch(p.len(), dim));
        }
        Ok(Self { dim, points })
    }

    /// `n` equally spaced points on the circle of radius `r` about `center`.
    pub fn circle(center: [f64; 2], r: f64, n: usize) -> Result<Self> {
        Self::new(
            (0..n)
                .map(|i| {
                    let t = std::f64::consts::TAU * i as f64 / n as f64;
                    vec![center[0] + r * t.cos(), center[1] + r * t.sin()]
                })
                .collect(),
        )
    }
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `max_x min_y |x - y|`.
pub fn directed_hausdorff(x: &PointCloud, y: &PointCloud) -> f64 {
    let mut worst = 0.0f64;
    for p in &x.points {
        let mut best = f64::INFINITY;
        for q in &y.points {
            best = best.min(dist2(p, q));
            if best <= worst {
                break;
            }
        }
        worst = worst.max(best);
    }
    worst.sqrt()
}

pub fn hausdorff_distance(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    if x.dim != y.dim {
        return Err(Error::DimensionMismatch(x.dim, y.dim));
    }
    Ok(directed_hausdorff(x, y).max(directed_hausdorff(y, x)))
}

/// Affine isometry `x -> L x + t` with `L` orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    pub linear: DMatrix<f64>,
    pub translation: DVector<f64>,
}

impl Isometry {
    pub fn new(linear: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let l = linear.nrows();
        if linear.ncols() != l || translation.len() != l {
            return Err(Error::DimensionMismatch(translation.len(), l));
        }
        if (linear.transpose() * &linear - DMatrix::identity(l, l)).amax() > 1e-12 {
            return Err(Error::InvalidParameter(
                "linear part is not orthogonal".into(),
            ));
        }
        Ok(Self {
            linear,
            translation,
        })
    }

    pub fn translation(t: &[f64]) -> Self {
        Self {
            linear: DMatrix::identity(t.len(), t.len()),
            translation: DVector::from_column_slice(t),
        }
    }

    /// Planar rotation by `angle` about `center`.
    pub fn rotation_about(angle: f64, center: [f64; 2]) -> Self {
        let (s, c) = angle.sin_cos();
        let linear = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
        let cv = DVector::from_column_slice(&center);
        let translation = &cv - &linear * &cv;
        Self {
            linear,
            translation,
        }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (&self.linear * DVector::from_column_slice(x) + &self.translation)
            .iter()
            .copied()
            .collect()
    }

    pub fn apply_inverse(&self, x: &[f64]) -> Vec<f64> {
        (self.linear.transpose() * (DVector::from_column_slice(x) - &self.translation))
            .iter()
            .copied()
            .collect()
    }
}

/// Convex polytope in `R^l`, `l <= 3`, as its vertices and facet halfspaces
/// `n . x <= c`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvexBody {
    pub dim: usize,
    pub vertices: Vec<Vec<f64>>,
    pub halfspaces: Vec<(Vec<f64>, f64)>,
}

impl ConvexBody {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let cloud = PointCloud::new(vertices)?;
        let dim = cloud.dim;
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "dimension {dim} not in 1..=3"
            )));
        }
        let vertices = cloud.points;
        if affine_rank(&vertices) < dim {
            return Err(Error::DegenerateBody(format!(
                "vertices do not span R^{dim}"
            )));
        }
        let halfspaces = match dim {
            1 => {
                let lo = vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
                let hi = vertices
                    .iter()
                    .map(|v| v[0])
                    .fold(f64::NEG_INFINITY, f64::max);
                vec![(vec![1.0], hi), (vec![-1.0], -lo)]
            }
            2 => planar_facets(&vertices),
            _ => spatial_facets(&vertices),
        };
        Ok(Self {
            dim,
            vertices,
            halfspaces,
        })
    }

    /// One vertex per line, coordinates separated by commas.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut vertices = vec![];
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", n + 1)))
                })
                .collect::<Result<Vec<_>>>()?;
            vertices.push(row);
        }
        Self::new(vertices)
    }

    pub fn square(side: f64) -> Result<Self> {
        Self::new(vec![
            vec![0.0, 0.0],
            vec![side, 0.0],
            vec![side, side],
            vec![0.0, side],
        ])
    }

    /// Regular polygon inscribed in the circle of radius `r`.
    pub fn polygonized_disk(r: f64, n: usize) -> Result<Self> {
        Self::new(PointCloud::circle([0.0, 0.0], r, n)?.points)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.halfspaces
            .iter()
            .all(|(n, c)| n.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() <= c + INSIDE_TOL)
    }

    pub fn bounding_box(&self) -> Vec<(f64, f64)> {
        bounding_box(&self.vertices)
    }

    /// Exact length or area for `l <= 2`.
    pub fn exact_volume(&self) -> Option<f64> {
        match self.dim {
            1 => Some(self.halfspaces[0].1 + self.halfspaces[1].1),
            2 => {
                let hull = convex_hull_2d(&self.vertices);
                let n = hull.len();
                Some(
                    0.5 * (0..n)
                        .map(|i| {
                            let (a, b) = (&hull[i], &hull[(i + 1) % n]);
                            a[0] * b[1] - a[1] * b[0]
                        })
                        .sum::<f64>()
                        .abs(),
                )
            }
            _ => None,
        }
    }

    pub fn image(&self, a: &Isometry) -> Result<Self> {
        Self::new(self.vertices.iter().map(|v| a.apply(v)).collect())
    }
}

fn bounding_box(points: &[Vec<f64>]) -> Vec<(f64, f64)> {
    (0..points[0].len())
        .map(|i| {
            points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[i]), hi.max(p[i]))
                })
        })
        .collect()
}

fn affine_rank(points: &[Vec<f64>]) -> usize {
    let dim = points[0].len();
    if points.len() < 2 {
        return 0;
    }
    let rows: Vec<f64> = points[1..]
        .iter()
        .flat_map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b))
        .collect();
    let m = DMatrix::from_row_slice(points.len() - 1, dim, &rows);
    let scale = m.amax().max(f64::MIN_POSITIVE);
    m.svd(false, false)
        .singular_values
        .iter()
        .filter(|s| **s > 1e-10 * scale)
        .count()
}

/// Andrew's monotone chain, counterclockwise, collinear points dropped.
fn convex_hull_2d(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<&Vec<f64>> = points.iter().collect();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    let cross = |o: &[f64], a: &[f64], b: &[f64]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<&Vec<f64>> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &&Vec<f64>>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull.into_iter().cloned().collect()
}

fn planar_facets(vertices: &[Vec<f64>]) -> Vec<(Vec<f64>, f64)> {
    let hull = convex_hull_2d(vertices);
    let n = hull.len();
    (0..n)
        .map(|i| {
            let (a, b) = (&hull[i], &hull[(i + 1) % n]);
            let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
            let len = dx.hypot(dy);
            let normal = vec![dy / len, -dx / len];
            let c = normal[0] * a[0] + normal[1] * a[1];
            (normal, c)
        })
        .collect()
}

/// Planes through vertex triples with every vertex on one side.
fn spatial_facets(vertices: &[Vec<f64>]) -> Vec<(Vec<f64>, f64)> {
    let n = vertices.len();
    let scale = bounding_box(vertices)
        .iter()
        .map(|(lo, hi)| hi - lo)
        .fold(0.0, f64::max);
    let tol = 1e-10 * scale.max(1.0);
    let mut out: Vec<(Vec<f64>, f64)> = vec![];
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (a, b, c) = (&vertices[i], &vertices[j], &vertices[k]);
                let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                let nrm = [
                    u[1] * v[2] - u[2] * v[1],
                    u[2] * v[0] - u[0] * v[2],
                    u[0] * v[1] - u[1] * v[0],
                ];
                let len = (nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]).sqrt();
                if len <= tol * scale {
                    continue;
                }
                let mut normal: Vec<f64> = nrm.iter().map(|x| x / len).collect();
                let mut off: f64 = normal.iter().zip(a.iter()).map(|(p, q)| p * q).sum();
                let side =
                    |p: &Vec<f64>| normal.iter().zip(p).map(|(x, y)| x * y).sum::<f64>() - off;
                let (lo, hi) = vertices.iter().fold((0.0f64, 0.0f64), |(lo, hi), p| {
                    let s = side(p);
                    (lo.min(s), hi.max(s))
                });
                if lo < -tol && hi > tol {
                    continue;
                }
                if hi > tol {
                    normal.iter_mut().for_each(|x| *x = -*x);
                    off = -off;
                }
                let duplicate = out.iter().any(|(m, c)| {
                    (c - off).abs() <= tol
                        && m.iter().zip(&normal).all(|(x, y)| (x - y).abs() <= 1e-9)
                });
                if !duplicate {
                    out.push((normal, off));
                }
            }
        }
    }
    out
}

/// Smallest enclosing ball `(center, radius)` (Welzl, on a fixed shuffle).
pub fn min_enclosing_ball(points: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let mut pts = points.to_vec();
    pts.shuffle(&mut sample_rng(0, 0));
    welzl(&pts, &mut vec![], points[0].len())
}

fn welzl(points: &[Vec<f64>], boundary: &mut Vec<Vec<f64>>, dim: usize) -> (Vec<f64>, f64) {
    if points.is_empty() || boundary.len() == dim + 1 {
        return ball_through(boundary, dim);
    }
    let (p, rest) = points.split_last().unwrap();
    let ball = welzl(rest, boundary, dim);
    if dist2(p, &ball.0).sqrt() <= ball.1 * (1.0 + 1e-12) + 1e-15 {
        return ball;
    }
    boundary.push(p.clone());
    let ball = welzl(rest, boundary, dim);
    boundary.pop();
    ball
}

/// Smallest ball with every point of `boundary` on its sphere.
fn ball_through(boundary: &[Vec<f64>], dim: usize) -> (Vec<f64>, f64) {
    match boundary.len() {
        0 => (vec![0.0; dim], -1.0),
        1 => (boundary[0].clone(), 0.0),
        k => {
            let p0 = &boundary[0];
            let vs: Vec<Vec<f64>> = boundary[1..]
                .iter()
                .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
                .collect();
            let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
            let m = DMatrix::from_fn(k - 1, k - 1, |i, j| 2.0 * dot(&vs[i], &vs[j]));
            let rhs = DVector::from_fn(k - 1, |i, _| dot(&vs[i], &vs[i]));
            match m.lu().solve(&rhs) {
                Some(lam) => {
                    let center: Vec<f64> = (0..dim)
                        .map(|c| p0[c] + (0..k - 1).map(|i| lam[i] * vs[i][c]).sum::<f64>())
                        .collect();
                    let r = boundary
                        .iter()
                        .map(|p| dist2(p, &center).sqrt())
                        .fold(0.0, f64::max);
                    (center, r)
                }
                None => {
                    // affinely dependent: the farthest pair spans the ball
                    let mut best = (0, 0, -1.0);
                    for i in 0..k {
                        for j in i + 1..k {
                            let d = dist2(&boundary[i], &boundary[j]);
                            if d > best.2 {
                                best = (i, j, d);
                            }
                        }
                    }
                    let center = boundary[best.0]
                        .iter()
                        .zip(&boundary[best.1])
                        .map(|(a, b)| 0.5 * (a + b))
                        .collect();
                    (center, 0.5 * best.2.sqrt())
                }
            }
        }
    }
}

/// Displacement of the center of the smallest ball containing `Y`; zero
/// exactly when `A` maps that ball to itself.
pub fn translational_part(body: &ConvexBody, a: &Isometry) -> Vec<f64> {
    let (center, _) = min_enclosing_ball(&body.vertices);
    a.apply(&center)
        .iter()
        .zip(&center)
        .map(|(x, y)| x - y)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VolumeEstimate {
    pub value: f64,
    pub std_error: f64,
}

impl VolumeEstimate {
    fn from_count(count: usize, samples: usize, box_volume: f64) -> Self {
        let p = count as f64 / samples as f64;
        Self {
            value: p * box_volume,
            std_error: box_volume * (p * (1.0 - p) / samples as f64).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnionVolumeReport {
    pub samples: usize,
    pub seed: u64,
    pub box_volume: f64,
    pub volume: VolumeEstimate,
    pub union_volume: VolumeEstimate,
    /// `vol(A(Y) \ Y)`, estimated directly; the increase of the union.
    pub increase: VolumeEstimate,
    pub translational_part: Vec<f64>,
}

/// Monte-Carlo `vol(Y)` and `vol(Y u A(Y))` over the bounding box of both,
/// with sample `i` drawn from stream `(seed, i)`.
pub fn union_volume(
    body: &ConvexBody,
    a: &Isometry,
    samples: usize,
    seed: u64,
) -> Result<UnionVolumeReport> {
    if a.dim() != body.dim {
        return Err(Error::DimensionMismatch(a.dim(), body.dim));
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let mut all = body.vertices.clone();
    all.extend(body.vertices.iter().map(|v| a.apply(v)));
    let bbox = bounding_box(&all);
    let box_volume: f64 = bbox.iter().map(|(lo, hi)| hi - lo).product();
    let (in_y, in_union, in_new) = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            let x: Vec<f64> = bbox
                .iter()
                .map(|&(lo, hi)| lo + (hi - lo) * rng.gen::<f64>())
                .collect();
            let y = body.contains(&x);
            let ay = body.contains(&a.apply_inverse(&x));
            (y as usize, (y || ay) as usize, (ay && !y) as usize)
        })
        .reduce(|| (0, 0, 0), |p, q| (p.0 + q.0, p.1 + q.1, p.2 + q.2));
    Ok(UnionVolumeReport {
        samples,
        seed,
        box_volume,
        volume: VolumeEstimate::from_count(in_y, samples, box_volume),
        union_volume: VolumeEstimate::from_count(in_union, samples, box_volume),
        increase: VolumeEstimate::from_count(in_new, samples, box_volume),
        translational_part: translational_part(body, a),
    })
}

/// `{x : |n . (x - offset)| <= half_width}` with direction angle `phi`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FramedStrip2D {
    pub phi: f64,
    pub half_width: f64,
    pub offset: [f64; 2],
}

impl FramedStrip2D {
    pub fn new(phi: f64, half_width: f64, offset: [f64; 2]) -> Result<Self> {
        if !(half_width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "strip half-width must be positive, got {half_width}"
            )));
        }
        Ok(Self {
            phi,
            half_width,
            offset,
        })
    }

    pub fn direction(&self) -> [f64; 2] {
        [self.phi.cos(), self.phi.sin()]
    }

    pub fn normal(&self) -> [f64; 2] {
        [-self.phi.sin(), self.phi.cos()]
    }

    /// Signed distance from the center line.
    pub fn offset_of(&self, x: [f64; 2]) -> f64 {
        let n = self.normal();
        n[0] * (x[0] - self.offset[0]) + n[1] * (x[1] - self.offset[1])
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        self.offset_of(x).abs() <= self.half_width * (1.0 + 1e-12)
    }
}

/// Rectangle `center + t e + s n` for `|t| <= length / 2`, `s` in
/// `[s_lo, s_hi]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatBox2D {
    pub center: [f64; 2],
    pub axis: [f64; 2],
    pub normal: [f64; 2],
    pub length: f64,
    pub s_lo: f64,
    pub s_hi: f64,
    /// `C = delta / 4`, the guaranteed gain in cross-section.
    pub gain: f64,
    pub theta: f64,
}

impl FlatBox2D {
    pub fn cross_section(&self) -> f64 {
        self.s_hi - self.s_lo
    }

    pub fn point(&self, t: f64, s: f64) -> [f64; 2] {
        [
            self.center[0] + t * self.axis[0] + s * self.normal[0],
            self.center[1] + t * self.axis[1] + s * self.normal[1],
        ]
    }

    /// `n x n` grid of points covering the box, corners included.
    pub fn grid(&self, n: usize) -> Vec<[f64; 2]> {
        let step = |i: usize| {
            if n == 1 {
                0.5
            } else {
                i as f64 / (n - 1) as f64
            }
        };
        (0..n)
            .flat_map(|i| {
                (0..n).map(move |j| {
                    let t = self.length * (step(i) - 0.5);
                    let s = self.s_lo + (self.s_hi - self.s_lo) * step(j);
                    self.point(t, s)
                })
            })
            .collect()
    }
}

/// Longest box aligned with `f1`, with cross-section `f1`'s width plus
/// `C = delta / 4` on one side, contained in `f1 u f2`. The extra band
/// must lie in `f2`, which is an exact interval computation along the axis.
pub fn thicken_strips(f1: &FramedStrip2D, f2: &FramedStrip2D) -> Result<FlatBox2D> {
    let theta = {
        let d = (f2.phi - f1.phi).rem_euclid(std::f64::consts::PI);
        d.min(std::f64::consts::PI - d)
    };
    if theta < 1e-15 {
        return Err(Error::ParallelStrips);
    }
    let delta = f1.half_width.min(f2.half_width);
    if theta >= delta {
        return Err(Error::InvalidParameter(format!(
            "angle {theta} must be below the width parameter {delta}"
        )));
    }
    let gain = delta / 4.0;
    let (e, n1) = (f1.direction(), f1.normal());
    let n2 = f2.normal();
    // f2 in f1's frame: |a t + b s - c| <= w2
    let a = n2[0] * e[0] + n2[1] * e[1];
    let b = n2[0] * n1[0] + n2[1] * n1[1];
    let c = n2[0] * (f2.offset[0] - f1.offset[0]) + n2[1] * (f2.offset[1] - f1.offset[1]);
    let w1 = f1.half_width;
    let w2 = f2.half_width;
    let allowed = |s: f64| {
        let (lo, hi) = ((c - w2 - b * s) / a, (c + w2 - b * s) / a);
        (lo.min(hi), lo.max(hi))
    };
    let mut best: Option<(f64, f64, f64, f64)> = None;
    for (s_lo, s_hi, band) in [
        (-w1, w1 + gain, (w1, w1 + gain)),
        (-w1 - gain, w1, (-w1 - gain, -w1)),
    ] {
        let (l0, h0) = allowed(band.0);
        let (l1, h1) = allowed(band.1);
        let (lo, hi) = (l0.max(l1), h0.min(h1));
        if hi > lo && best.is_none_or(|(bl, bh, _, _)| hi - lo > bh - bl) {
            best = Some((lo, hi, s_lo, s_hi));
        }
    }
    let (lo, hi, s_lo, s_hi) =
        best.ok_or_else(|| Error::InvalidParameter("strips do not overlap enough".into()))?;
    let mid = 0.5 * (lo + hi);
    Ok(FlatBox2D {
        center: [f1.offset[0] + mid * e[0], f1.offset[1] + mid * e[1]],
        axis: e,
        normal: n1,
        length: hi - lo,
        s_lo,
        s_hi,
        gain,
        theta,
    })
}

/// Fraction of an `n x n` grid of the box lying in `f1 u f2`.
pub fn box_coverage(b: &FlatBox2D, f1: &FramedStrip2D, f2: &FramedStrip2D, n: usize) -> f64 {
    let grid = b.grid(n);
    grid.iter()
        .filter(|&&x| f1.contains(x) || f2.contains(x))
        .count() as f64
        / grid.len() as f64
}
