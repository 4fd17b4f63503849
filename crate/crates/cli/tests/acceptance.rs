//! Acceptance criteria, one PASS/FAIL line each at its pinned tolerance.
//!
//! Runs as a plain binary (`harness = false`) so the lines always print.
//! A criterion listed in `UNATTAINABLE` may fail without failing the
//! target; every other failure exits nonzero.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use caplab::capacity::{
    capacity_axisym_fd, capacity_harmonically_flat, capacity_radial, default_thresholds, extract_level_sets,
    AxisymDomainSpec, CapacitySolution,
};
use caplab::geometry::{RadialConformalMetric, SchwarzschildSpec};
use caplab::gluing::{adm_vs_lambda, corner_jump_check, minkowski_gap, solve_interface_radius, GluedManifold};
use caplab::harness::{
    rigidity_radius, verify_bray_miao, verify_lc2, verify_mass_capacity_and_penrose, verify_schwarzschild_identities,
};
use caplab::quasilocal::{
    embed_revolution, induced_metric, quasilocal_report, total_euclidean_mean_curvature, MeanCurvatureConvention,
    QuasiLocalReport, RevolutionSurfaceMetric,
};
use caplab::surface::MeridianCurve;
use caplab::symmetrization::{rearranged_energy, szego_schwarzschild_compare, IsoperimetricProfile};
use caplab_cli::config::Scenario;
use caplab_cli::{run_batch, GOLDEN_SCENARIO};

/// Criteria whose stated numbers cannot hold; see the notes printed with
/// them.
const UNATTAINABLE: &[(u32, &str)] = &[(
    7,
    "for the horizon boundary the level S_c is the sphere r = mc/(2-2c), where the gap law \
     2(r_A - r_c) - m - m/c vanishes identically, so gap(0.75) = 1/3 cannot hold",
)];

const MASSES: [f64; 3] = [0.5, 1.0, 2.0];
const RADIUS_FACTORS: [f64; 6] = [0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

type Check = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Every `(m, r0)` of the closed-form grid.
fn grid() -> impl Iterator<Item = (f64, f64)> {
    MASSES.into_iter().flat_map(|m| RADIUS_FACTORS.into_iter().map(move |k| (m, k * 0.5 * m)))
}

fn metric(m: f64, r0: f64) -> RadialConformalMetric {
    SchwarzschildSpec::with_r_min(m, 0.5 * r0.min(0.5 * m)).unwrap().metric()
}

fn sphere_report(metric: &RadialConformalMetric, r0: f64) -> QuasiLocalReport {
    quasilocal_report(metric, &MeridianCurve::sphere(r0), MeanCurvatureConvention::TowardInfinity).unwrap()
}

/// Coordinate radius from the area radius: the `+` branch outside the
/// horizon, the `-` branch inside.
fn radius_from_area_radius(m: f64, r_a: f64, outside: bool) -> f64 {
    let root = (r_a * r_a - 2.0 * m * r_a).max(0.0).sqrt();
    0.5 * (r_a - m + if outside { root } else { -root })
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut worst_branch: f64 = 0.0;
    for (m, r0) in grid() {
        let g = metric(m, r0);
        let exact = r0 + 0.5 * m;
        let radial = capacity_radial(&g.clone().into(), r0).unwrap().capacity;
        let flat = capacity_harmonically_flat(&g, r0).unwrap();
        worst = worst.max(rel(radial, exact)).max(rel(flat, exact));
        let r_a = g.area_radius(r0).unwrap();
        let branch = radius_from_area_radius(m, r_a, r0 >= 0.5 * m) + 0.5 * m;
        worst_branch = worst_branch.max(rel(radial, branch));
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst <= 1e-8 && worst_branch <= 1e-8 && secs < 1.0,
        format!("max rel error {worst:.2e}, branch cross-check {worst_branch:.2e}, {secs:.3} s"),
    )
}

fn criterion_2() -> Outcome {
    let (mut lambda, mut total): (f64, f64) = (0.0, 0.0);
    for (m, r0) in grid() {
        for r in verify_schwarzschild_identities(m, r0).unwrap() {
            let err = (r.lhs - r.rhs).abs();
            match r.name.as_str() {
                "capacity_lambda_identity" => lambda = lambda.max(err),
                "total_mean_curvature_identity" => total = total.max(err),
                _ => {}
            }
        }
    }
    outcome(
        lambda <= 1e-8 && total <= 1e-8,
        format!("2C = Lambda + int H/8pi off by {lambda:.2e}, int (H0 + H)/8pi = 2r0 + m off by {total:.2e}"),
    )
}

fn criterion_3() -> Outcome {
    let mut horizon: f64 = 0.0;
    for m in MASSES {
        let (c, p) = verify_mass_capacity_and_penrose(&metric(m, m)).unwrap();
        horizon = horizon.max((c.lhs - m).abs()).max((c.rhs - m).abs()).max((p.lhs - p.rhs).abs());
    }
    let mut bray_miao: f64 = 0.0;
    for (m, r0) in grid().filter(|&(m, r0)| r0 >= 0.5 * m) {
        let g = metric(m, r0);
        let sol = capacity_radial(&g.clone().into(), r0).unwrap();
        let r = verify_bray_miao(&sol, &sphere_report(&g, r0)).unwrap();
        bray_miao = bray_miao.max((r.lhs - r.rhs).abs());
    }
    let g = metric(2.0, 1.0);
    let q = sphere_report(&g, 1.0);
    let h0 = q.total_h_g0.unwrap() / (16.0 * PI);
    let c = capacity_radial(&g.into(), 1.0).unwrap().capacity;
    let corollary = (h0 - 2.0).abs().max((c - 2.0).abs());
    outcome(
        horizon <= 1e-8 && bray_miao <= 1e-8 && corollary <= 1e-8,
        format!(
            "mass-capacity/Penrose {horizon:.2e}, Bray-Miao {bray_miao:.2e}, int H0/16pi = {h0:.12} and C = {c:.12} at m = 2"
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst: f64 = 0.0;
    let (mut inside, mut outside) = (0, 0);
    for (m, r0) in grid() {
        let q = sphere_report(&metric(m, r0), r0);
        worst = worst.max((q.hawking - m).abs());
        if r0 < 0.5 * m {
            inside += 1;
        } else if r0 > 0.5 * m {
            outside += 1;
        }
    }
    outcome(worst <= 1e-10, format!("max |m_H - m| = {worst:.2e} over {inside} spheres inside, {outside} outside"))
}

fn flat_sphere(grid: (usize, usize)) -> (CapacitySolution, f64) {
    let mut d = AxisymDomainSpec::new(MeridianCurve::sphere(1.0), RadialConformalMetric::flat(0.5), grid);
    d.options.estimate_grid_error = false;
    let start = Instant::now();
    let sol = capacity_axisym_fd(&d).unwrap();
    (sol, start.elapsed().as_secs_f64())
}

fn criterion_5() -> Outcome {
    let (coarse, _) = flat_sphere((256, 128));
    let (fine, secs) = flat_sphere((512, 256));
    let (e1, e2) = ((coarse.capacity - 1.0).abs(), (fine.capacity - 1.0).abs());
    let spread = coarse.flux_spread.max(fine.flux_spread);
    outcome(
        e1 < 0.01 && e1 / e2 >= 3.0 && spread < 1e-3 && secs < 30.0,
        format!(
            "256x128 error {e1:.2e}, 512x256 error {e2:.2e} (ratio {:.2}), flux spread {spread:.2e}, 512x256 solve {secs:.2} s",
            e1 / e2
        ),
    )
}

/// `(m, boundary)` pairs, all enclosing the horizon.
fn battery() -> Vec<(f64, MeridianCurve)> {
    use MeridianCurve::{MuPolynomial, Spheroid};
    vec![
        (1.0, Spheroid { equatorial: 1.0, polar: 1.0 }),
        (1.0, Spheroid { equatorial: 1.0, polar: 1.3 }),
        (1.0, Spheroid { equatorial: 1.0, polar: 1.6 }),
        (1.0, Spheroid { equatorial: 1.4, polar: 1.0 }),
        (1.0, MuPolynomial { r0: 1.0, coeffs: vec![0.2] }),
        (2.0, Spheroid { equatorial: 1.2, polar: 1.8 }),
        (2.0, Spheroid { equatorial: 1.8, polar: 1.2 }),
        (2.0, Spheroid { equatorial: 1.5, polar: 1.55 }),
        (2.0, MuPolynomial { r0: 1.3, coeffs: vec![0.15, -0.05] }),
        (2.0, MuPolynomial { r0: 1.6, coeffs: vec![-0.15] }),
    ]
}

/// `sqrt(1 - (short/long)^2)` of the polar and equatorial radii.
fn eccentricity(curve: &MeridianCurve) -> f64 {
    let (p, e) = (curve.radius(0.0), curve.radius(0.5 * PI));
    (1.0 - (p.min(e) / p.max(e)).powi(2)).sqrt()
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    let mut least_strict = f64::INFINITY;
    for (k, (m, curve)) in battery().into_iter().enumerate() {
        let ecc = eccentricity(&curve);
        let g = SchwarzschildSpec::new(m).unwrap().metric();
        let sol = capacity_axisym_fd(&AxisymDomainSpec::new(curve, g, (128, 128))).unwrap();
        let err = sol.error_estimate();
        let szego = szego_schwarzschild_compare(&sol, m).unwrap();
        let levels = extract_level_sets(&sol, &default_thresholds(&sol, 40)).unwrap();
        let chain = rearranged_energy(&levels, &IsoperimetricProfile::schwarzschild(m).unwrap()).unwrap();
        let mut ok = szego.gap >= -5.0 * err && chain.chain_monotone;
        if ecc >= 0.3 {
            ok &= szego.gap > 3.0 * err;
            least_strict = least_strict.min(szego.gap / err);
        }
        if !ok {
            failures.push(format!("#{k} (e = {ecc:.2}, gap {:.2e}, error {err:.2e})", szego.gap));
        }
    }
    outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("10 boundaries, chains monotone, smallest strict gap {least_strict:.0}x grid error")
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn criterion_7() -> Outcome {
    let m = 2.0;
    let g = metric(m, 1.0);
    let sol = capacity_radial(&g.clone().into(), 1.0).unwrap();
    let bq = sphere_report(&g, 1.0);
    let mut law_err: f64 = 0.0;
    let mut gaps = Vec::new();
    for c in [0.6, 0.75, 0.9, 0.99] {
        let levels = extract_level_sets(&sol, &[2.0 - 2.0 * c]).unwrap();
        let level = &levels.levels[0];
        let lq = quasilocal_report(&g, &level.curve, MeanCurvatureConvention::TowardInfinity).unwrap();
        let r = verify_lc2(&sol, &bq, c, level, &lq).unwrap();
        let rc = level.curve.radius(0.0);
        let law = 2.0 * (g.area_radius(rc).unwrap() - rc) - m - m / c;
        law_err = law_err.max((r.gap - law).abs());
        gaps.push((c, r.gap));
    }
    let at_075 = gaps[1].1;
    let monotone = gaps.windows(2).all(|w| w[1].1.abs() <= w[0].1.abs() + 1e-12) && gaps[3].1.abs() <= 1e-8;
    let third = (at_075 - 1.0 / 3.0).abs() <= 1e-8;
    let shown: Vec<String> = gaps.iter().map(|(c, g)| format!("gap({c}) = {g:.1e}")).collect();
    outcome(
        law_err <= 1e-8 && third && monotone,
        format!(
            "law matched to {law_err:.1e}; {}; gap(0.75) = 1/3 {}; gap -> 0 monotonically {}",
            shown.join(", "),
            if third { "holds" } else { "does not hold" },
            if monotone { "holds" } else { "does not hold" }
        ),
    )
}

fn criterion_8() -> Outcome {
    let r = solve_interface_radius(2.0, 1.0).unwrap();
    let exact = (3.0 + 2.0 * 2f64.sqrt()) / 2.0;
    let g = GluedManifold::new(2.0, 1.0).unwrap();
    let corner = corner_jump_check(&g).unwrap();
    let adm = adm_vs_lambda(&g).unwrap();
    let mink = minkowski_gap(&RevolutionSurfaceMetric::spheroid(1.0, 2.0).unwrap()).unwrap();
    let pass = (r - exact).abs() <= 1e-10
        && corner.passes
        && corner.h_plus.abs() <= 1e-12
        && corner.h_minus >= 0.0
        && (adm.lhs - 2.0).abs() <= 1e-8
        && (adm.rhs - 1.0).abs() <= 1e-8
        && adm.satisfied
        && mink.gap > mink.tolerance;
    outcome(
        pass,
        format!(
            "r' = {r:.15} (error {:.1e}), H+ = {:.1e} <= H- = {:.6}, ADM {:.10} vs Lambda/2 {:.10}, Minkowski gap {:.4}",
            (r - exact).abs(),
            corner.h_plus,
            corner.h_minus,
            adm.lhs,
            adm.rhs,
            mink.gap
        ),
    )
}

/// `int (k1 + k2) dA` over the prolate spheroid with equatorial radius `a`
/// and polar radius `c > a`.
fn prolate_total_mean_curvature(a: f64, c: f64) -> f64 {
    let f = (c * c - a * a).sqrt();
    2.0 * PI * (2.0 * c + a * a / f * ((c + f) / (c - f)).ln())
}

fn criterion_9() -> Outcome {
    let s = RevolutionSurfaceMetric::spheroid(1.0, 2.0).unwrap();
    let e = embed_revolution(&s).unwrap();
    let back = e.induced_metric().unwrap();
    let sup = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let round_trip = sup(s.rho(), back.rho()).max(sup(s.speed(), back.speed()));
    let h0 = total_euclidean_mean_curvature(&e).unwrap();
    let h0_err = (h0 - prolate_total_mean_curvature(1.0, 2.0)).abs();
    let g = SchwarzschildSpec::new(1.0).unwrap().metric();
    let metrics = [
        s,
        RevolutionSurfaceMetric::spheroid(2.0, 1.0).unwrap(),
        RevolutionSurfaceMetric::round(3.0).unwrap(),
        induced_metric(&g, &MeridianCurve::sphere(0.3)).unwrap(),
        induced_metric(&g, &MeridianCurve::Spheroid { equatorial: 1.0, polar: 1.6 }).unwrap(),
        induced_metric(&g, &MeridianCurve::MuPolynomial { r0: 1.3, coeffs: vec![0.15, -0.05] }).unwrap(),
    ];
    let gb = metrics.iter().map(|m| (m.total_gauss_curvature() - 4.0 * PI).abs()).fold(0.0, f64::max);
    outcome(
        round_trip <= 1e-8 && h0_err <= 1e-6 && gb <= 1e-6,
        format!(
            "round trip {round_trip:.1e}, int H0 vs analytic {h0_err:.1e}, Gauss-Bonnet {gb:.1e} on {} metrics",
            metrics.len()
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b, c) = (rng.random_range(0.01..100.0), rng.random_range(0.0..100.0), rng.random_range(0.01..100.0));
        let n: u32 = rng.random_range(3..8);
        let x = rigidity_radius(a, b, c, n).unwrap();
        let k = n as f64 - 2.0;
        let terms = [-a * k * x.powf(-k), b * x, c * (n as f64 - 1.0)];
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        worst = worst.max(terms.iter().sum::<f64>().abs() / scale);
    }
    // b = 0: n = 3 gives x = A / 2c, n = 4 gives x = sqrt(2A / 3c)
    let exact = [(3.0, 0.5), (7.0, 1.75), (1.0, 4.0)].iter().all(|&(a, c)| {
        rigidity_radius(a, 0.0, c, 3).unwrap() == a / (2.0 * c)
            && rigidity_radius(a, 0.0, c, 4).unwrap() == (2.0 * a / (3.0 * c)).sqrt()
    });
    outcome(
        worst < 1e-12 && exact,
        format!("max relative residual {worst:.1e} over 100 cases; b = 0 closed forms exact: {exact}"),
    )
}

fn payload(dir: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut out = Vec::new();
    for sub in ["report", "data"] {
        let mut names: Vec<_> = fs::read_dir(dir.join(sub)).unwrap().map(|e| e.unwrap().path()).collect();
        names.sort();
        out.extend(names.into_iter().map(|p| (p.strip_prefix(dir).unwrap().to_path_buf(), fs::read(&p).unwrap())));
    }
    out.push(("summary.csv".into(), fs::read(dir.join("summary.csv")).unwrap()));
    out
}

fn criterion_11() -> Outcome {
    let path = Path::new("schwarzschild-identities.toml");
    let scenario = Scenario::parse(GOLDEN_SCENARIO, path).unwrap();
    let tmp = tempfile::tempdir().unwrap();
    let dirs = [tmp.path().join("a"), tmp.path().join("b")];
    for d in &dirs {
        run_batch(&[(path.to_path_buf(), scenario.clone())], d).unwrap();
    }
    let (a, b) = (payload(&dirs[0]), payload(&dirs[1]));
    let same = a == b;
    let bytes: usize = a.iter().map(|(_, v)| v.len()).sum();
    outcome(same, format!("{} files, {bytes} bytes, identical: {same}", a.len()))
}

fn main() -> ExitCode {
    let criteria: [Check; 11] = [
        (1, "Schwarzschild capacity closed form", criterion_1),
        (2, "identity suite", criterion_2),
        (3, "equality cases", criterion_3),
        (4, "Hawking-mass constancy", criterion_4),
        (5, "meridian solver accuracy", criterion_5),
        (6, "symmetrization battery", criterion_6),
        (7, "level-set gap law", criterion_7),
        (8, "gluing example", criterion_8),
        (9, "embedding oracle", criterion_9),
        (10, "rigidity radius", criterion_10),
        (11, "determinism", criterion_11),
    ];
    let mut unexpected = Vec::new();
    for (id, title, check) in criteria {
        let o = check();
        println!("criterion {id:>2} {} {title}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            match UNATTAINABLE.iter().find(|(k, _)| *k == id) {
                Some((_, why)) => println!("             expected: {why}"),
                None => unexpected.push(id),
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
