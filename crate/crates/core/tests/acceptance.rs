//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use lasersheet::imgcore::detect_features;
use lasersheet::matching::{
    estimate_offset, normalized_cosine_similarity, pair_correspondences, OffsetOptions,
};
use lasersheet::optimize::{
    build_sheet_problem, count_dof, finite_difference_jacobian, gauge_align, initial_guess_from_cameras,
    levenberg_marquardt, particle_rms, spearman, BundleOptions, BundleProblem, FnProblem, InitialGuess,
    NllsProblem, SheetModel, SolverOptions, SurfaceConstraint,
};
use lasersheet::pipeline::{self, CalibrationMode, PipelineConfig, RigKind};
use lasersheet::synth::{
    generate_scene, scene_spec, translate_pair, vergence_pair, SamplingRegion, SceneRng,
};
use nalgebra::DVector;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn accuracy_formula() -> Outcome {
    let table = pipeline::cmd_accuracy(11.0, 1.0, 22.4, 1600.0, None).unwrap();
    let (_, _, dz, dx) = pipeline::parse_accuracy_row(&table).unwrap();
    let alpha = 11f64.to_radians();
    let beta = std::f64::consts::PI - alpha;
    let (a, b) = (1.0 / beta.sin(), 1.0 / alpha.sin());
    let expected = (a * a + b * b + 2.0 * a * b * alpha.cos()).sqrt();
    let pass = dz / dx >= 10.0 && (1.0..=1.01).contains(&dx) && (dz - expected).abs() <= 1e-9;
    check(
        pass,
        format!(
            "dz {dz:.9} px, dx {dx:.9} px, dz/dx {:.4}, closed form {expected:.9}",
            dz / dx
        ),
    )
}

fn pixel_pitch() -> Outcome {
    let table = pipeline::cmd_accuracy(11.0, 1.0, 22.4, 1600.0, None).unwrap();
    let line = table.lines().find(|l| l.starts_with("pixel_pitch_um")).unwrap();
    let pitch: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    check(pitch == 14.0, format!("pitch {pitch} um"))
}

fn dof_table() -> Outcome {
    let rows = [
        ((2, 18), (108, 108)),
        ((3, 9), (81, 81)),
        ((4, 8), (92, 96)),
        ((5, 7), (101, 105)),
    ];
    let bad: Vec<_> = rows
        .iter()
        .filter(|(mn, want)| count_dof(mn.0, mn.1) != *want)
        .collect();
    check(bad.is_empty(), format!("{} of 4 rows reproduced", 4 - bad.len()))
}

fn template_matching() -> Outcome {
    let (w, h) = (WIDTH, HEIGHT);
    let mut rng = SceneRng::new(2024);
    let mut hits = 0;
    for k in 0..50 {
        let offset = (
            (rng.uniform_in(10.0, 90.0)) as i64,
            (rng.uniform_in(-10.0, 10.0)) as i64,
        );
        let cams = translate_pair(FOCAL, w, h, offset);
        let mut spec = scene_spec(cams, w, h, 150, 0.0, 1000 + k);
        // Particles everywhere either camera looks.
        let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
        spec.region = SamplingRegion::Rect {
            x_min: -cx + offset.0.min(0) as f64,
            x_max: cx + offset.0.max(0) as f64,
            y_min: -cy + offset.1.min(0) as f64,
            y_max: cy + offset.1.max(0) as f64,
        };
        let (truth, images) = generate_scene(&spec).unwrap();
        let est = estimate_offset(&images[0], &images[1], &OffsetOptions::default()).unwrap();
        if Some(est.offset) == truth.offset && truth.offset == Some(offset) {
            hits += 1;
        }
    }

    let mut ncs_ok = 0;
    for _ in 0..1000 {
        let n = 1 + (rng.uniform() * 64.0) as usize;
        let a: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
        let c = rng.uniform_in(0.01, 100.0);
        let s = normalized_cosine_similarity(&a, &b).unwrap();
        let scaled: Vec<f64> = b.iter().map(|x| c * x).collect();
        let neg: Vec<f64> = a.iter().map(|x| -2.0 * x).collect();
        let in_range = (0.0..=1.0).contains(&s);
        let invariant = (normalized_cosine_similarity(&a, &scaled).unwrap() - s).abs() < 1e-12;
        let anti = normalized_cosine_similarity(&a, &neg).unwrap().abs() < 1e-12;
        if in_range && invariant && anti {
            ncs_ok += 1;
        }
    }
    check(
        hits == 50 && ncs_ok == 1000,
        format!("{hits}/50 offsets exact, {ncs_ok}/1000 similarity checks"),
    )
}

fn plane_reconstruction() -> (Outcome, bool) {
    let mut worst = (0.0f64, 0.0f64);
    let mut flat = true;
    let mut mono = true;
    for seed in 0..5 {
        let truth = slab_scene(10, 0.0, 50 + seed);
        let (_, obs) = truth.common_observations();
        let init = perturbed_guess(&truth.cameras, &truth.points, seed);
        let res = BundleProblem::new(obs, SurfaceConstraint::Plane, &init, BundleOptions::default())
            .unwrap()
            .solve(&SolverOptions::default())
            .unwrap();
        let (_, aligned) = gauge_align(&res.points, &truth.points).unwrap();
        worst = (worst.0.max(res.rms_px), worst.1.max(aligned));
        flat &= res.points.iter().all(|p| p.z == 0.0);
        mono &= monotone(&res.report);
    }
    let pass = worst.0 < 1e-6 && worst.1 < 1e-3 && flat;
    (
        check(
            pass,
            format!(
                "5 scenes: worst rms {:.1e} px, worst aligned point rms {:.1e}, all z = 0: {flat}",
                worst.0, worst.1
            ),
        ),
        mono,
    )
}

fn plane_failure_mode() -> (Outcome, bool) {
    let depth = 20.0;
    let mut ratios = Vec::new();
    let mut mono = true;
    for seed in 0..5 {
        let mut truth = slab_scene(11, 0.0, 70 + seed);
        truth.points[10].z = depth / 2.0;
        let obs: Vec<Vec<(f64, f64)>> = truth
            .points
            .iter()
            .map(|p| {
                truth
                    .cameras
                    .iter()
                    .map(|c| lasersheet::geometry::project(c, p).unwrap())
                    .collect()
            })
            .collect();
        let init = perturbed_guess(&truth.cameras, &truth.points, seed);
        let res = BundleProblem::new(
            obs.clone(),
            SurfaceConstraint::Plane,
            &init,
            BundleOptions::default(),
        )
        .unwrap()
        .solve(&SolverOptions::default())
        .unwrap();
        mono &= monotone(&res.report);
        let errs = particle_rms(&res.cameras, &res.points, &obs);
        ratios.push(errs[10] / median(errs[..10].to_vec()));
    }
    let worst = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    (
        check(
            worst >= 5.0,
            format!("outlier / median in-plane residual over 5 scenes: min {worst:.1}, all {ratios:.1?}"),
        ),
        mono,
    )
}

fn sheet_reconstruction() -> (Outcome, bool) {
    let depth = 20.0;
    let sheet = SheetModel::canonical(depth);
    let truth = slab_scene(18, depth, 90);
    let (_, obs) = truth.common_observations();
    let mut mono = true;

    let exact = InitialGuess {
        cameras: truth.cameras.clone(),
        points: truth.points.clone(),
        scales: None,
    };
    let res = build_sheet_problem(obs.clone(), &sheet, &exact, BundleOptions::default())
        .unwrap()
        .solve(&SolverOptions::default())
        .unwrap();
    mono &= monotone(&res.report);
    let inside = res.points.iter().all(|p| p.z.abs() <= depth / 2.0);
    let exact_rms = res.rms_px;

    let mut rhos = Vec::new();
    for seed in 0..5 {
        let init = perturbed_guess(&truth.cameras, &truth.points, seed);
        let res = build_sheet_problem(obs.clone(), &sheet, &init, BundleOptions::default())
            .unwrap()
            .solve(&SolverOptions::default())
            .unwrap();
        mono &= monotone(&res.report);
        let (t, _) = gauge_align(&res.points, &truth.points).unwrap();
        let z: Vec<f64> = res.points.iter().map(|p| t.apply(p).z).collect();
        let z_true: Vec<f64> = truth.points.iter().map(|p| p.z).collect();
        rhos.push(spearman(&z, &z_true));
    }
    let rho = rhos.iter().cloned().fold(f64::INFINITY, f64::min);

    // Rendered with noise, detected, paired, solved from the true cameras.
    let cams = vergence_pair(FOCAL, WIDTH, HEIGHT, (40.0, 0.0), VERGENCE_DEG.to_radians()).unwrap();
    let mut spec = scene_spec(cams.clone(), WIDTH, HEIGHT, 18, depth, 91);
    spec.noise = 0.1;
    spec.min_separation_px = 14.0;
    let (_, images) = generate_scene(&spec).unwrap();
    let f0 = detect_features(&images[0], 0.3, 5, 2000);
    let f1 = detect_features(&images[1], 0.3, 5, 2000);
    let est = estimate_offset(&images[0], &images[1], &OffsetOptions::default()).unwrap();
    let pairs = pair_correspondences(&f0, &f1, est.offset, 7.0).unwrap();
    let nobs: Vec<Vec<(f64, f64)>> = pairs.pairs.iter().map(|p| vec![p.p1, p.p2]).collect();
    let init = initial_guess_from_cameras(cams, &nobs, Some(&sheet)).unwrap();
    let noisy = build_sheet_problem(nobs, &sheet, &init, BundleOptions::default())
        .unwrap()
        .solve(&SolverOptions::default())
        .unwrap();
    mono &= monotone(&noisy.report);

    let pass = inside && exact_rms < 1e-6 && rho >= 0.95 && noisy.rms_px < 0.5;
    (
        check(
            pass,
            format!(
                "exact-init rms {exact_rms:.1e} px, |z| <= d/2: {inside}, min depth rank correlation {rho:.3} over 5 starts, noisy rms {:.3} px from {} pairs",
                noisy.rms_px,
                pairs.len()
            ),
        ),
        mono,
    )
}

fn solver_suite(all_monotone: bool) -> Outcome {
    let rosen = FnProblem {
        num_params: 2,
        num_residuals: 2,
        f: |x: &DVector<f64>| DVector::from_vec(vec![1.0 - x[0], 10.0 * (x[1] - x[0] * x[0])]),
    };
    let (x, rep) = levenberg_marquardt(
        &rosen,
        DVector::from_vec(vec![-1.2, 1.0]),
        &SolverOptions::default(),
    )
    .unwrap();
    let rosen_ok =
        rep.final_cost < 1e-16 && (x[0] - 1.0).abs() < 1e-6 && (x[1] - 1.0).abs() < 1e-6 && monotone(&rep);

    let mut rng = SceneRng::new(77);
    let mut worst = 0.0f64;
    for k in 0..100 {
        let truth = slab_scene(6, 10.0, 300 + k);
        let (_, obs) = truth.common_observations();
        let mut cams = truth.cameras.clone();
        let fit_distortion = k % 2 == 0;
        if fit_distortion {
            for c in &mut cams {
                let mut d = [0.0; 8];
                d.iter_mut().for_each(|v| *v = rng.uniform_in(-0.05, 0.05));
                c.distortion = lasersheet::geometry::Distortion::from_array(d);
            }
        }
        let options = BundleOptions {
            square_pixels: k % 3 != 0,
            fit_distortion,
            eliminate_scales: k % 5 == 0,
            ..Default::default()
        };
        let constraint = if k % 4 == 0 {
            SurfaceConstraint::Plane
        } else {
            SurfaceConstraint::Sheet {
                lower: -5.0,
                upper: 5.0,
            }
        };
        let init = InitialGuess {
            cameras: cams,
            points: truth.points.clone(),
            scales: None,
        };
        let p = BundleProblem::new(obs, constraint, &init, options).unwrap();
        let mut x = p.initial_parameters().clone();
        for v in x.iter_mut() {
            *v += rng.uniform_in(-1e-2, 1e-2) * v.abs().clamp(1.0, 10.0);
        }
        let a = p.jacobian(&x).unwrap();
        let n = finite_difference_jacobian(&p, &x);
        for (ai, ni) in a.iter().zip(n.iter()) {
            worst = worst.max((ai - ni).abs() / ai.abs().max(ni.abs()).max(1.0));
        }
    }
    let pass = all_monotone && rosen_ok && worst < 1e-5;
    check(
        pass,
        format!(
            "monotone traces: {all_monotone}, Rosenbrock cost {:.1e} at ({:.9}, {:.9}), worst Jacobian discrepancy {worst:.1e} over 100 configurations",
            rep.final_cost, x[0], x[1]
        ),
    )
}

fn run_pipeline(dir: &Path) {
    let mut cfg = PipelineConfig::default();
    cfg.synth.rig = RigKind::Vergence;
    cfg.synth.seed = 4242;
    cfg.synth.min_separation_px = 14.0;
    cfg.output_dir = dir.join("scene");
    pipeline::cmd_synth(&cfg).unwrap();

    cfg.input.images = vec![dir.join("scene/camera_0.pgm"), dir.join("scene/camera_1.pgm")];
    cfg.detect.threshold = 0.01;
    cfg.pair.tolerance_px = 7.0;
    cfg.calibrate.sheet_depth = Some(cfg.synth.depth);
    cfg.output_dir = dir.join("run");
    pipeline::cmd_detect(&cfg).unwrap();
    pipeline::cmd_match(&cfg).unwrap();
    pipeline::cmd_pair(&cfg).unwrap();
    pipeline::cmd_calibrate(&cfg, CalibrationMode::Sheet).unwrap();
}

fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files = Vec::new();
    for sub in ["scene", "run"] {
        let mut entries: Vec<_> = std::fs::read_dir(dir.join(sub))
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for p in entries {
            files.push((
                format!("{sub}/{}", p.file_name().unwrap().to_string_lossy()),
                std::fs::read(&p).unwrap(),
            ));
        }
    }
    files
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    run_pipeline(tmp.path());
    let first = snapshot(tmp.path());
    std::fs::remove_dir_all(tmp.path().join("run")).unwrap();
    std::fs::remove_dir_all(tmp.path().join("scene")).unwrap();
    run_pipeline(tmp.path());
    let second = snapshot(tmp.path());
    let data_files = first
        .iter()
        .filter(|(n, _)| n.ends_with(".json") || n.ends_with(".csv"))
        .count();
    let same = first == second;
    check(
        same && data_files >= 8,
        format!(
            "{} files ({data_files} JSON/CSV) byte-identical: {same}",
            first.len()
        ),
    )
}

fn main() {
    let mut all_pass = true;
    let mut report = |id: u32, name: &str, limit: Option<Duration>, run: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = limit.map_or(true, |l| elapsed < l);
        let pass = outcome.pass && in_time;
        all_pass &= pass;
        println!(
            "criterion {id} {name}: {} ({}; {:.2} s{})",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            limit.map_or(String::new(), |l| format!(" of {} s allowed", l.as_secs_f64()))
        );
    };

    let mut mono = true;
    report(
        1,
        "accuracy formula",
        Some(Duration::from_secs(1)),
        &mut accuracy_formula,
    );
    report(2, "pixel pitch", Some(Duration::from_secs(1)), &mut pixel_pitch);
    report(3, "dof table", None, &mut dof_table);
    report(
        4,
        "template matching",
        Some(Duration::from_secs(30)),
        &mut template_matching,
    );
    report(
        5,
        "plane reconstruction",
        Some(Duration::from_secs(10)),
        &mut || {
            let (o, m) = plane_reconstruction();
            mono &= m;
            o
        },
    );
    report(6, "plane failure mode", None, &mut || {
        let (o, m) = plane_failure_mode();
        mono &= m;
        o
    });
    report(
        7,
        "sheet reconstruction",
        Some(Duration::from_secs(60)),
        &mut || {
            let (o, m) = sheet_reconstruction();
            mono &= m;
            o
        },
    );
    report(8, "solver suite", None, &mut || solver_suite(mono));
    report(9, "determinism", None, &mut determinism);

    if !all_pass {
        std::process::exit(1);
    }
}
