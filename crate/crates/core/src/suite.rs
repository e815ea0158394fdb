//! Named verification checks for each capability, shared by the command
//! line and `report-all`.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde_json::{json, Value};

use crate::arith::{charpoly_reduction_check, field_report};
use crate::cylinder::{
    apply_deck, closing_scan, core_holonomy_power, eigen_obstruction, singular_membership,
    RotationBlock, TwistedCylinder, DEFAULT_CLOSE_TOL, DEFAULT_S_MAX,
};
use crate::error::{Error, Result};
use crate::flats::{
    box_coverage, hausdorff_distance, thicken_strips, union_volume, ConvexBody, FramedStrip2D,
    Isometry, PointCloud,
};
use crate::flow::{
    integrate_geodesic_switching, integrate_many, normalize, parallel_transport, riccati_expansion,
    ChartPolicy, PhaseState, DEFAULT_STEP,
};
use crate::geometry::{
    curvature_components_closed_form, default_region, sample_rng, scan_nonpositive, MetricChart,
};
use crate::profiles::{boundary_match, verify_profile, WarpingProfile};
use crate::report::{value, Check};

/// Checks plus free-form data for one capability.
pub struct Outcome {
    pub checks: Vec<Check>,
    pub data: Value,
}

#[derive(Clone, Debug)]
pub struct ProfileParams {
    pub k: f64,
    pub grid_max: f64,
    pub grid_step: f64,
}

impl Default for ProfileParams {
    fn default() -> Self {
        Self {
            k: 19.0,
            grid_max: 60.0,
            grid_step: 1e-3,
        }
    }
}

pub fn profile_checks(p: &ProfileParams) -> Result<Outcome> {
    let profile = WarpingProfile::interpolated(p.k)?;
    let report = verify_profile(&profile, p.grid_max, p.grid_step)?;
    let boundary = boundary_match(&profile, p.grid_max, p.grid_step);
    let checks = report
        .checks
        .iter()
        .map(|c| {
            Check::new(
                c.name.clone(),
                c.passed,
                c.worst_value,
                json!({ "r": c.worst_location }),
            )
        })
        .collect();
    Ok(Outcome {
        checks,
        data: json!({ "profile": profile.name(), "boundary_match": value(&boundary) }),
    })
}

#[derive(Clone, Debug)]
pub struct CurvatureParams {
    pub k: f64,
    pub samples: usize,
    pub seed: u64,
    pub r_min: f64,
    pub r_max: f64,
    pub grid_points: usize,
    pub fd_points: usize,
}

impl Default for CurvatureParams {
    fn default() -> Self {
        Self {
            k: 19.0,
            samples: 10_000,
            seed: 42,
            r_min: 1e-3,
            r_max: 45.0,
            grid_points: 1000,
            fd_points: 200,
        }
    }
}

pub fn curvature_checks(p: &CurvatureParams) -> Result<Outcome> {
    if p.grid_points < 2 || p.fd_points < 2 {
        return Err(Error::InvalidParameter(
            "grid and finite-difference point counts must be >= 2".into(),
        ));
    }
    let profile = WarpingProfile::interpolated(p.k)?;
    let chart = MetricChart::four_d(profile.clone());
    let scan = scan_nonpositive(
        &chart,
        p.samples,
        p.seed,
        &default_region(&chart, p.r_min, p.r_max),
    )?;
    let mut checks = vec![Check::at_most(
        "max sectional curvature",
        scan.max_k,
        1e-9,
        json!({ "point": scan.argmax_point }),
    )];

    let hyperbolic_samples = (p.samples / 10).max(1);
    for (label, chart) in [
        (
            "hyperbolic four-d curvature",
            MetricChart::four_d(WarpingProfile::Hyperbolic),
        ),
        (
            "hyperbolic polar curvature",
            MetricChart::polar(2, WarpingProfile::Hyperbolic)?,
        ),
    ] {
        let s = scan_nonpositive(
            &chart,
            hyperbolic_samples,
            p.seed ^ 7,
            &default_region(&chart, 0.05, 6.0),
        )?;
        let worst = (s.max_k + 1.0).abs().max((s.min_k + 1.0).abs());
        checks.push(Check::at_most(
            label,
            worst,
            1e-8,
            json!({ "max_k": s.max_k, "min_k": s.min_k }),
        ));
    }

    let (mut worst, mut at) = (f64::NEG_INFINITY, (0.0, 0.0));
    for i in 0..p.grid_points {
        let r = p.r_min + (p.r_max - p.r_min) * i as f64 / (p.grid_points - 1) as f64;
        let theta =
            0.01 + (PI - 0.02) * ((i * 37) % p.grid_points) as f64 / (p.grid_points - 1) as f64;
        let c = curvature_components_closed_form(&profile, r, theta)?.max();
        if c > worst {
            worst = c;
            at = (r, theta);
        }
    }
    checks.push(Check::at_most(
        "closed-form components",
        worst,
        1e-12,
        json!({ "r": at.0, "theta": at.1 }),
    ));

    let (mut worst, mut at) = (0.0f64, 0.0);
    for i in 0..p.fd_points {
        let r = 1e-2 + (p.r_max - 1e-2) * i as f64 / (p.fd_points - 1) as f64;
        let x = [r, 1.0, 0.5, 0.0];
        let exact = chart.riemann(&x)?;
        let fd = chart.riemann_finite_difference(&x)?;
        let scale = exact.max_abs().max(1.0);
        let err = exact
            .data
            .iter()
            .zip(&fd.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / scale;
        if err > worst {
            worst = err;
            at = r;
        }
    }
    checks.push(Check::at_most(
        "finite-difference agreement",
        worst,
        1e-5,
        json!({ "r": at }),
    ));
    Ok(Outcome {
        checks,
        data: value(&scan),
    })
}

/// Random unit-speed start in the polar chart with `n = 1`.
pub fn random_orbit_start(chart: &MetricChart, seed: u64, index: u64) -> Result<PhaseState> {
    let mut rng = sample_rng(seed, index);
    let r = rng.gen_range(0.2..30.0);
    let theta = rng.gen_range(0.0..TAU);
    let z = rng.gen_range(-1.0..1.0);
    let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    normalize(chart, &PhaseState::new(vec![r, theta, z], v))
}

#[derive(Clone, Debug)]
pub struct FlowParams {
    pub k: f64,
    pub orbits: usize,
    pub t_end: f64,
    pub step: f64,
    pub seed: u64,
}

impl Default for FlowParams {
    fn default() -> Self {
        Self {
            k: 19.0,
            orbits: 4,
            t_end: 100.0,
            step: DEFAULT_STEP,
            seed: 42,
        }
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn flow_checks(p: &FlowParams) -> Result<Outcome> {
    if p.orbits == 0 {
        return Err(Error::InvalidParameter("need at least one orbit".into()));
    }
    let chart = MetricChart::polar(1, WarpingProfile::interpolated(p.k)?)?;
    let starts = (0..p.orbits as u64)
        .map(|i| random_orbit_start(&chart, p.seed, i))
        .collect::<Result<Vec<_>>>()?;
    let paths = integrate_many(&chart, &starts, p.t_end, p.step, ChartPolicy::Switching)
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut drift = (0.0f64, 0usize);
    let mut reverse = (0.0f64, 0usize);
    let mut gram = (0.0f64, 0usize);
    for (i, (path, s)) in paths.iter().zip(&starts).enumerate() {
        let d = path.energy_drift()?;
        if d > drift.0 {
            drift = (d, i);
        }
        let back = integrate_geodesic_switching(
            &chart,
            &path.end_in_start_chart()?.reversed(),
            p.t_end,
            p.step,
        )?
        .end_in_start_chart()?;
        let e = max_diff(&back.position, &s.position)
            .max(max_diff(&back.velocity, &s.reversed().velocity));
        if e > reverse.0 {
            reverse = (e, i);
        }
        let frame = chart.orthonormalize(
            &s.position,
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        )?;
        let g = parallel_transport(path, &frame)?.defect;
        if g > gram.0 {
            gram = (g, i);
        }
    }

    // fourth order: halving a coarse step shrinks the error about 16 times
    let s = normalize(
        &chart,
        &PhaseState::new(vec![0.8, 0.3, 0.0], vec![-0.9, 0.1, 0.5]),
    )?;
    let reference = integrate_geodesic_switching(&chart, &s, 10.0, 2e-3)?.end_in_start_chart()?;
    let err = |h: f64| -> Result<f64> {
        let e = integrate_geodesic_switching(&chart, &s, 10.0, h)?.end_in_start_chart()?;
        Ok(max_diff(&e.position, &reference.position))
    };
    let ratio = err(0.1)? / err(0.05)?;

    let checks = vec![
        Check::at_most(
            "energy drift",
            drift.0,
            1e-8 * (1.0 + p.t_end),
            json!({ "orbit": drift.1 }),
        ),
        Check::at_most(
            "transported frame gram defect",
            gram.0,
            1e-8,
            json!({ "orbit": gram.1 }),
        ),
        Check::at_most(
            "reversibility",
            reverse.0,
            1e-6,
            json!({ "orbit": reverse.1 }),
        ),
        Check::at_least(
            "step halving ratio",
            ratio,
            8.0,
            json!({ "steps": [0.1, 0.05] }),
        ),
    ];
    let data = json!({
        "starts": starts.iter().map(value).collect::<Vec<_>>(),
        "ends": paths.iter().map(|p| p.end_in_start_chart().map(|e| value(&e))).collect::<Result<Vec<_>>>()?,
    });
    Ok(Outcome { checks, data })
}

#[derive(Clone, Debug)]
pub struct HolonomyParams {
    pub k: f64,
    pub angles: Vec<f64>,
    pub length: f64,
    pub step: f64,
}

impl Default for HolonomyParams {
    fn default() -> Self {
        Self {
            k: 19.0,
            angles: vec![1.0],
            length: 1.0,
            step: DEFAULT_STEP,
        }
    }
}

pub fn holonomy_checks(p: &HolonomyParams) -> Result<Outcome> {
    let profile = WarpingProfile::interpolated(p.k)?;
    let cyl = TwistedCylinder::new(
        p.length,
        RotationBlock::new(p.angles.clone())?,
        profile.clone(),
    )?;
    let h = core_holonomy_power(&cyl, 1, p.step)?;
    let twist_err = (&h - cyl.rho.matrix()).amax();
    let untwisted = TwistedCylinder::new(
        p.length,
        RotationBlock::new(vec![0.0; p.angles.len()])?,
        profile,
    )?;
    let h0 = core_holonomy_power(&untwisted, 1, p.step)?;
    let id_err = (&h0 - nalgebra::DMatrix::identity(h0.nrows(), h0.ncols())).amax();
    let rows = |m: &nalgebra::DMatrix<f64>| {
        (0..m.nrows())
            .map(|i| m.row(i).iter().copied().collect())
            .collect::<Vec<Vec<f64>>>()
    };
    Ok(Outcome {
        checks: vec![
            Check::at_most("holonomy equals twist", twist_err, 1e-8, Value::Null),
            Check::at_most("untwisted holonomy is identity", id_err, 1e-10, Value::Null),
        ],
        data: json!({ "holonomy": rows(&h), "twist": rows(&cyl.rho.matrix()) }),
    })
}

#[derive(Clone, Debug)]
pub struct ClosingParams {
    pub k: f64,
    pub angles: Vec<f64>,
    pub length: f64,
    pub radius: f64,
    pub periods: u64,
    pub close_tol: f64,
}

impl Default for ClosingParams {
    fn default() -> Self {
        Self {
            k: 19.0,
            angles: vec![1.0],
            length: 1.0,
            radius: 0.01,
            periods: DEFAULT_S_MAX,
            close_tol: DEFAULT_CLOSE_TOL,
        }
    }
}

pub fn closing_checks(p: &ClosingParams) -> Result<Outcome> {
    let profile = WarpingProfile::interpolated(p.k)?;
    let cyl = TwistedCylinder::new(p.length, RotationBlock::new(p.angles.clone())?, profile)?;
    let report = closing_scan(&cyl, p.radius, p.periods, p.close_tol)?;
    let start = report.start.clone();
    let mut worst = (0.0f64, 0u64);
    for s in 1..=p.periods {
        let image = apply_deck(&cyl, &start, s as i64)?;
        let r = image[..cyl.n * 2].iter().map(|c| c * c).sum::<f64>().sqrt();
        let e = (r - p.radius).abs();
        if e > worst.0 {
            worst = (e, s);
        }
    }
    let mut checks = vec![Check::at_most(
        "deck orbit keeps its radius",
        worst.0,
        1e-12,
        json!({ "s": worst.1 }),
    )];
    if p.angles.len() == 1 && p.radius > 0.0 {
        // distance 2 r0 |sin(w / 2)| < tol exactly when |w| is below this angle
        let tol = 2.0 * (p.close_tol / (2.0 * p.radius)).min(1.0).asin();
        let obstruction = eigen_obstruction(&cyl.rho, p.periods, tol)?;
        let mismatched = report
            .closed
            .iter()
            .filter(|s| !obstruction.flagged.contains(s))
            .count()
            + obstruction
                .flagged
                .iter()
                .filter(|s| !report.closed.contains(s))
                .count();
        checks.push(Check::violations(
            "closing matches eigen obstruction",
            mismatched,
            Value::Null,
        ));
    }
    let data = json!({
        "start": report.start,
        "closed": report.closed,
        "min_distance": report.min_distance,
        "argmin": report.argmin,
        "close_tol": report.close_tol,
    });
    Ok(Outcome { checks, data })
}

#[derive(Clone, Debug)]
pub struct EigenParams {
    pub angles: Vec<f64>,
    pub periods: u64,
    pub tol: f64,
}

impl Default for EigenParams {
    fn default() -> Self {
        Self {
            angles: vec![1.0],
            periods: 10_000,
            tol: 1e-9,
        }
    }
}

pub fn eigen_checks(p: &EigenParams) -> Result<Outcome> {
    let rho = RotationBlock::new(p.angles.clone())?;
    let report = eigen_obstruction(&rho, p.periods, p.tol)?;
    // compare with chords |rho_j^s e - e| of each block
    let (mut worst, mut at) = (0.0f64, 0u64);
    for s in 1..=p.periods.min(2000) {
        let m = rho.power(s as i64).matrix();
        let chord = (0..p.angles.len())
            .map(|j| ((m[(2 * j, 2 * j)] - 1.0).powi(2) + m[(2 * j + 1, 2 * j)].powi(2)).sqrt())
            .fold(f64::INFINITY, f64::min);
        let e = (chord - 2.0 * (report.values[s as usize - 1] / 2.0).sin()).abs();
        if e > worst {
            worst = e;
            at = s;
        }
    }
    Ok(Outcome {
        checks: vec![Check::at_most(
            "obstruction matches rotation powers",
            worst,
            1e-9,
            json!({ "s": at }),
        )],
        data: json!({ "flagged": report.flagged, "min_value": report.min_value, "argmin": report.argmin }),
    })
}

#[derive(Clone, Debug)]
pub struct FieldParams {
    pub primes: Vec<u64>,
    pub n: usize,
    pub reduction_primes: Vec<u64>,
    pub reductions: usize,
    pub seed: u64,
}

impl Default for FieldParams {
    fn default() -> Self {
        Self {
            primes: vec![3, 5, 7, 11, 13, 17, 19, 23],
            n: 2,
            reduction_primes: vec![5, 7, 11, 13],
            reductions: 1000,
            seed: 42,
        }
    }
}

pub fn field_checks(p: &FieldParams) -> Result<Outcome> {
    let reports = p
        .primes
        .iter()
        .map(|&q| field_report(q, p.n))
        .collect::<Result<Vec<_>>>()?;
    let bad = |f: &dyn Fn(&crate::arith::FieldReport) -> bool| {
        reports
            .iter()
            .filter(|r| !f(r))
            .map(|r| r.q)
            .collect::<Vec<_>>()
    };
    let split = bad(&|r| r.split_order == Some(r.q - 1));
    let aniso = bad(&|r| r.anisotropic_order == Some(r.q + 1));
    let forms = bad(&|r| r.forms_preserved);
    let eigen = bad(&|r| r.elements.iter().all(|e| e.certificate.matches));
    let mut failures = vec![];
    for (pi, &prime) in p.reduction_primes.iter().enumerate() {
        for i in 0..p.reductions {
            let mut rng = sample_rng(p.seed, (pi * p.reductions + i) as u64);
            let size = rng.gen_range(1..=5);
            let g: Vec<Vec<i64>> = (0..size)
                .map(|_| (0..size).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            if !charpoly_reduction_check(&g, prime)?.equal {
                failures.push(json!({ "prime": prime, "matrix": g }));
            }
        }
    }
    let checks = vec![
        Check::violations("split block order q - 1", split.len(), json!(split)),
        Check::violations("anisotropic block order q + 1", aniso.len(), json!(aniso)),
        Check::violations("forms preserved", forms.len(), json!(forms)),
        Check::violations("eigenvalue multisets", eigen.len(), json!(eigen)),
        Check::violations("charpoly reduction", failures.len(), json!(failures)),
    ];
    let data = json!({
        "fields": reports.iter().map(|r| json!({
            "q": r.q,
            "generator": r.generator,
            "nonresidue": r.nonresidue,
            "norm_one_generator": [r.norm_one_generator.a, r.norm_one_generator.b],
            "split_order": r.split_order,
            "anisotropic_order": r.anisotropic_order,
            "identity_form_isotropic": r.identity_form_isotropic,
            "charpolys": r.elements.iter().map(|e| json!({
                "variant": value(&e.variant),
                "charpoly": e.certificate.charpoly,
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    });
    Ok(Outcome { checks, data })
}

#[derive(Clone, Debug)]
pub struct HausdorffParams {
    pub triples: usize,
    pub points: usize,
    pub seed: u64,
    /// Optional pair of clouds whose distance is reported.
    pub pair: Option<(PointCloud, PointCloud)>,
}

impl Default for HausdorffParams {
    fn default() -> Self {
        Self {
            triples: 1000,
            points: 12,
            seed: 42,
            pair: None,
        }
    }
}

fn random_cloud(seed: u64, index: u64, n: usize) -> Result<PointCloud> {
    let mut rng = sample_rng(seed, index);
    PointCloud::new(
        (0..n)
            .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()])
            .collect(),
    )
}

pub fn hausdorff_checks(p: &HausdorffParams) -> Result<Outcome> {
    if p.points == 0 {
        return Err(Error::InvalidParameter(
            "clouds need at least one point".into(),
        ));
    }
    let (mut symmetry, mut identity, mut triangle) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    let mut at = 0;
    for i in 0..p.triples as u64 {
        let x = random_cloud(p.seed, 3 * i, p.points)?;
        let y = random_cloud(p.seed, 3 * i + 1, p.points)?;
        let z = random_cloud(p.seed, 3 * i + 2, p.points)?;
        let xy = hausdorff_distance(&x, &y)?;
        symmetry = symmetry.max((xy - hausdorff_distance(&y, &x)?).abs());
        identity = identity.max(hausdorff_distance(&x, &x)?);
        let excess = hausdorff_distance(&x, &z)? - xy - hausdorff_distance(&y, &z)?;
        if excess > triangle {
            triangle = excess;
            at = i;
        }
    }
    let checks = vec![
        Check::at_most("symmetry", symmetry, 0.0, Value::Null),
        Check::at_most("distance to itself", identity, 0.0, Value::Null),
        Check::at_most(
            "triangle inequality excess",
            triangle,
            1e-12,
            json!({ "triple": at }),
        ),
    ];
    let data = match &p.pair {
        Some((a, b)) => json!({ "distance": hausdorff_distance(a, b)? }),
        None => Value::Null,
    };
    Ok(Outcome { checks, data })
}

#[derive(Clone, Debug)]
pub struct TranslationCase {
    pub label: String,
    pub body: ConvexBody,
    pub isometry: Isometry,
}

#[derive(Clone, Debug)]
pub struct TranslationParams {
    pub cases: Vec<TranslationCase>,
    pub samples: usize,
    pub seed: u64,
}

impl TranslationParams {
    /// Unit square shifted by `(1/2, 0)` and a 256-gon disk shifted by
    /// `(0, 1/100)`.
    pub fn standard(samples: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            cases: vec![
                TranslationCase {
                    label: "square".into(),
                    body: ConvexBody::square(1.0)?,
                    isometry: Isometry::translation(&[0.5, 0.0]),
                },
                TranslationCase {
                    label: "disk".into(),
                    body: ConvexBody::polygonized_disk(1.0, 256)?,
                    isometry: Isometry::translation(&[0.0, 1e-2]),
                },
            ],
            samples,
            seed,
        })
    }
}

pub fn translation_checks(p: &TranslationParams) -> Result<Outcome> {
    let mut checks = vec![];
    let mut data = serde_json::Map::new();
    for (i, case) in p.cases.iter().enumerate() {
        let r = union_volume(
            &case.body,
            &case.isometry,
            p.samples,
            p.seed.wrapping_add(i as u64),
        )?;
        // the union can only be smaller than Y through sampling error
        let sigma = r.increase.std_error.max(f64::MIN_POSITIVE);
        checks.push(Check::at_least(
            format!("{}: union not smaller", case.label),
            (r.union_volume.value - r.volume.value) / sigma,
            -3.0,
            Value::Null,
        ));
        let shift = r
            .translational_part
            .iter()
            .map(|c| c * c)
            .sum::<f64>()
            .sqrt();
        if shift >= 1e-2 {
            checks.push(Check::at_least(
                format!("{}: strict increase in standard errors", case.label),
                r.increase.value / sigma,
                3.0,
                json!({ "translational_part": r.translational_part }),
            ));
        }
        data.insert(case.label.clone(), value(&r));
    }
    Ok(Outcome {
        checks,
        data: Value::Object(data),
    })
}

#[derive(Clone, Debug)]
pub struct ThickenParams {
    pub delta: f64,
    pub thetas: Vec<f64>,
    pub grid: usize,
}

impl Default for ThickenParams {
    fn default() -> Self {
        Self {
            delta: 1.0,
            thetas: vec![0.1, 0.05, 0.02, 0.01, 0.005],
            grid: 100,
        }
    }
}

pub fn thicken_checks(p: &ThickenParams) -> Result<Outcome> {
    let mut boxes = vec![];
    let mut section = (f64::INFINITY, 0.0);
    let mut coverage = (f64::INFINITY, 0.0);
    for &theta in &p.thetas {
        let f1 = FramedStrip2D::new(0.0, p.delta, [0.0, 0.0])?;
        let f2 = FramedStrip2D::new(theta, p.delta, [0.0, 0.0])?;
        let b = thicken_strips(&f1, &f2)?;
        let margin = b.cross_section() - (2.0 * p.delta + p.delta / 4.0);
        if margin < section.0 {
            section = (margin, theta);
        }
        let c = box_coverage(&b, &f1, &f2, p.grid);
        if c < coverage.0 {
            coverage = (c, theta);
        }
        boxes.push((theta, b));
    }
    let mut ordered: Vec<&(f64, _)> = boxes.iter().collect();
    ordered.sort_by(|a, b| b.0.total_cmp(&a.0));
    let decreasing = ordered
        .windows(2)
        .filter(|w| !(w[1].1.length > w[0].1.length))
        .count();
    let checks = vec![
        Check::at_least(
            "cross-section gain",
            section.0,
            -1e-12,
            json!({ "theta": section.1 }),
        ),
        Check::at_least(
            "box inside the strips",
            coverage.0,
            1.0,
            json!({ "theta": coverage.1 }),
        ),
        Check::violations("length grows as the angle closes", decreasing, Value::Null),
    ];
    let data = json!({
        "boxes": boxes.iter().map(|(t, b)| json!({ "theta": t, "length": b.length, "cross_section": b.cross_section() })).collect::<Vec<_>>(),
    });
    Ok(Outcome { checks, data })
}

#[derive(Clone, Debug)]
pub struct SingularParams {
    pub k: f64,
    pub t_end: f64,
    pub step: f64,
}

impl Default for SingularParams {
    fn default() -> Self {
        Self {
            k: 19.0,
            t_end: 100.0,
            step: DEFAULT_STEP,
        }
    }
}

/// Axis-parallel orbits in the flat tube are singular, and the Riccati
/// proxy matches its flat and hyperbolic closed forms.
pub fn singular_checks(p: &SingularParams) -> Result<Outcome> {
    let profile = WarpingProfile::interpolated(p.k)?;
    let cyl = TwistedCylinder::new(1.0, RotationBlock::new(vec![1.0])?, profile.clone())?;
    let state = PhaseState::new(vec![0.005, 0.0, 0.0], vec![0.0, 0.0, 1.0]);
    let m = singular_membership(&cyl, &state, p.t_end, p.step)?;

    let flat = MetricChart::cartesian(1, profile)?;
    let path = integrate_geodesic_switching(&flat, &state, p.t_end, p.step)?;
    let u = riccati_expansion(&path, 1.0, p.t_end)?.u;
    let expected = 1.0 / (1.0 + p.t_end);
    let flat_err = (&u - nalgebra::DMatrix::identity(2, 2) * expected).amax();

    let hyp = MetricChart::polar(1, WarpingProfile::Hyperbolic)?;
    let hyp_t = p.t_end.min(10.0);
    let hpath = integrate_geodesic_switching(
        &hyp,
        &PhaseState::new(vec![2.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]),
        hyp_t,
        p.step,
    )?;
    let hu = riccati_expansion(&hpath, 1.0, hyp_t)?.u;
    let hyp_err = (&hu - nalgebra::DMatrix::identity(2, 2)).amax();

    let checks = vec![
        Check::new(
            "axis-parallel orbit stays in the flat tube",
            m.inside,
            m.max_radius,
            json!({ "exit_time": m.exit_time }),
        ),
        Check::at_most(
            "curvature along the orbit",
            m.max_curvature,
            1e-10,
            Value::Null,
        ),
        Check::at_most(
            "flat riccati decay",
            flat_err,
            1e-6,
            json!({ "t": p.t_end }),
        ),
        Check::at_most(
            "hyperbolic riccati fixed point",
            hyp_err,
            1e-6,
            json!({ "t": hyp_t }),
        ),
    ];
    Ok(Outcome {
        checks,
        data: value(&m),
    })
}
