//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//!
//! Run with `cargo test -p sparse-gauss --test acceptance`.

mod common;

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{rngs::StdRng, Rng, SeedableRng};
use sparse_gauss::field::default_padding;
use sparse_gauss::mesh::{hausdorff, DEFAULT_SAMPLES_PER_TRIANGLE};
use sparse_gauss::model::ObjectiveWeights;
use sparse_gauss::optimizer::{adaptive_weights, max_pointwise_error};
use sparse_gauss::persist::{ModelDocument, ModelMetadata};
use sparse_gauss::*;

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn exact_start() -> Outcome {
    let mut rng = StdRng::seed_from_u64(1);
    let mut molecules = vec![diala()];
    for n in [1, 7, 40] {
        let atoms = (0..n)
            .map(|i| {
                Atom::new(
                    i as i64 + 1,
                    random_point(&mut rng, 6.0),
                    rng.gen_range(0.5..2.2),
                )
            })
            .collect();
        molecules.push(Molecule::new(atoms, "random").unwrap());
    }
    let mut worst: f64 = 0.0;
    for m in &molecules {
        let field = GaussianField::from_molecule(m, 0.5, 1.0).unwrap();
        let model = init_model(&m.atoms, 0.5);
        let bbox = bounding_box(m, default_padding(m));
        for _ in 0..10_000 {
            let p = bbox.min()
                + bbox
                    .extent()
                    .component_mul(&Vec3::new(rng.gen(), rng.gen(), rng.gen()));
            worst = worst.max((model.eval(&p) - field.eval(&p)).abs());
        }
    }
    outcome(
        worst < 1e-10,
        format!("max |φ̃ - φ| over 4 molecules x 1e4 points = {worst:.2e} (< 1e-10)"),
    )
}

fn gradient_check() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let h = 1e-5;
    let (mut worst, mut floored, mut total) = (0.0f64, 0, 0);
    for _ in 0..50 {
        let n = rng.gen_range(1..=5);
        let model = RbfModel::new((0..n).map(|_| random_basis(&mut rng)).collect());
        let m = rng.gen_range(1..=100);
        let points: Vec<Vec3> = (0..m).map(|_| random_point(&mut rng, 3.0)).collect();
        let targets = (0..m).map(|_| rng.gen_range(0.0..2.0)).collect();
        let constraints = ConstraintSet::from_parts(points, targets).unwrap();
        let ws = rng.gen_range(0.01..1.0);
        let w = ObjectiveWeights::new(ws, 1.0 - ws);
        let analytic = model.objective_gradient(&constraints, w);
        let numeric = fd_gradient(&model, &constraints, w, h);
        // components below what central differences can resolve to 1e-5 relative
        let f = objective(&model.pack(), n, &constraints, w);
        let floor = fd_noise(f, h) / 1e-5;
        floored += analytic
            .iter()
            .zip(&numeric)
            .filter(|(a, b)| a.abs().max(b.abs()) < floor)
            .count();
        total += analytic.len();
        worst = worst.max(max_relative_error(&analytic, &numeric, floor));
    }
    outcome(
        worst < 1e-5,
        format!(
            "worst componentwise relative error over 50 instances = {worst:.2e} (< 1e-5); \
             {floored}/{total} components below the difference-quotient resolution compared absolutely"
        ),
    )
}

fn single_kernel_recovery() -> Outcome {
    let truth = EllipsoidRbf {
        coeff_sqrt: 1.5,
        decay_sqrt: Vec3::new(0.9, 0.7, 0.6),
        center: Vec3::new(0.3, -0.2, 0.1),
        angles: RotationAngles::new(0.4, -0.3, 0.8),
    };
    let target = move |p: &Vec3| truth.eval(p);
    let grid = make_grid(Aabb::cube(5.0), 0.5).unwrap();
    let constraints = select_constraints_for(&target, 1.0, &grid, 1.0).unwrap();
    let mut bases = vec![truth];
    for c in [
        [2.0, 0.0, 0.0],
        [-2.0, 0.0, 0.0],
        [0.0, 2.0, 0.0],
        [0.0, -2.0, 0.0],
    ] {
        bases.push(EllipsoidRbf {
            coeff_sqrt: 1e-4,
            ..EllipsoidRbf::isotropic(Vec3::from(c), 1.0, 0.5)
        });
    }
    let fit = optimize(
        &RbfModel::new(bases),
        &constraints,
        &OptimizerConfig::default(),
    );
    match fit {
        Ok(fit) => {
            let err = max_pointwise_error(&fit.model, &constraints);
            outcome(
                fit.model.len() == 1 && err < 0.05,
                format!(
                    "survivors = {} (== 1), max error at {} constraints = {err:.4} (< 0.05)",
                    fit.model.len(),
                    constraints.len()
                ),
            )
        }
        Err(f) => outcome(false, format!("optimisation failed: {f}")),
    }
}

fn sphere_geometry() -> Outcome {
    let field = GaussianField::new(&[Atom::new(1, Vec3::zeros(), 1.5)], 0.5, 1.0).unwrap();
    let mesh = extract_isosurface(&field, &Aabb::cube(3.0), 0.1, 1.0).unwrap();
    let (a, v) = (4.0 * PI * 1.5f64.powi(2), 4.0 / 3.0 * PI * 1.5f64.powi(3));
    let ea = (mesh.area() - a).abs() / a;
    let ev = (mesh.volume() - v).abs() / v;
    outcome(
        ea <= 0.02 && ev <= 0.02,
        format!(
            "area {:.4} vs {a:.4} (err {ea:.4}), volume {:.4} vs {v:.4} (err {ev:.4}), both <= 0.02",
            mesh.area(),
            mesh.volume()
        ),
    )
}

struct DialaRun {
    molecule: Molecule,
    config: OptimizerConfig,
    fit: std::result::Result<Fit, String>,
    seconds: f64,
    bbox: Aabb,
    field: GaussianField,
}

fn run_diala(max_iter: usize, sparse_iter: usize) -> DialaRun {
    let molecule = diala();
    let field = GaussianField::from_molecule(&molecule, 0.5, 1.0).unwrap();
    let bbox = bounding_box(&molecule, default_padding(&molecule));
    let constraints = select_constraints(&field, &make_grid(bbox, 1.0).unwrap(), 1.0).unwrap();
    let config = OptimizerConfig {
        max_iter,
        sparse_iter,
        ..OptimizerConfig::default()
    };
    let start = Instant::now();
    let fit = optimize(&init_model(&molecule.atoms, 0.5), &constraints, &config)
        .map_err(|f| f.to_string());
    DialaRun {
        molecule,
        config,
        fit,
        seconds: start.elapsed().as_secs_f64(),
        bbox,
        field,
    }
}

fn sparsification_envelope(run: &DialaRun) -> Outcome {
    let fit = match &run.fit {
        Ok(fit) => fit,
        Err(e) => return outcome(false, format!("optimisation failed: {e}")),
    };
    let sr = sparse_ratio(fit.model.len(), run.molecule.len());
    let report = match compare_surfaces(&run.field, &fit.model, &run.bbox, 0.5, 1.0) {
        Ok(r) => r,
        Err(e) => return outcome(false, format!("comparison failed: {e}")),
    };
    let pass = sr <= 0.5
        && report.area_error <= 0.05
        && report.volume_error <= 0.05
        && report.hausdorff <= 1.5;
    outcome(
        pass,
        format!(
            "{} atoms, max_iter {} sparse_iter {}: S_r = {}/{} = {sr:.3} (<= 0.5), Error_A = {:.4} (<= 0.05), \
             Error_V = {:.4} (<= 0.05), H = {:.3} A (<= 1.5), {:.1} s",
            run.molecule.len(),
            run.config.max_iter,
            run.config.sparse_iter,
            fit.model.len(),
            run.molecule.len(),
            report.area_error,
            report.volume_error,
            report.hausdorff,
            run.seconds
        ),
    )
}

fn trace_properties(run: &DialaRun) -> Outcome {
    let fit = match &run.fit {
        Ok(fit) => fit,
        Err(e) => return outcome(false, format!("optimisation failed: {e}")),
    };
    let r = &fit.trace.records;
    let monotone_count = r.windows(2).all(|w| w[1].nbasis <= w[0].nbasis);
    let armijo = r.iter().filter(|x| x.tau > 0.0).all(|x| x.f_after <= x.f);
    let accuracy_phase: Vec<_> = r
        .iter()
        .filter(|x| x.iter > run.config.sparse_iter)
        .collect();
    let frozen = accuracy_phase
        .iter()
        .all(|x| x.wl == 0.0 && x.nbasis == accuracy_phase[0].nbasis);
    let s = run.config.sparse_iter;
    let jump = (r[s - 1].f, r[s].f);
    outcome(
        monotone_count && armijo && frozen && !accuracy_phase.is_empty(),
        format!(
            "basis count non-increasing: {monotone_count}; accepted steps never raise f: {armijo}; \
             w_l = 0 and count fixed after sparse_iter: {frozen}; f across the switch {:.3e} -> {:.3e}",
            jump.0, jump.1
        ),
    )
}

fn weight_identities() -> Outcome {
    let w1 = adaptive_weights(3.0, 1.0, 0.01);
    let w2 = adaptive_weights(0.0, 5.0, 0.01);
    // a model far from its target: the cap must force pure accuracy
    let truth = EllipsoidRbf::isotropic(Vec3::zeros(), 3.0, 0.5);
    let target = move |p: &Vec3| truth.eval(p);
    let constraints =
        select_constraints_for(&target, 1.0, &make_grid(Aabb::cube(4.0), 0.5).unwrap(), 1.0)
            .unwrap();
    let off = RbfModel::new(vec![EllipsoidRbf::isotropic(Vec3::zeros(), 6.0, 0.5)]);
    let config = OptimizerConfig {
        max_iter: 1,
        sparse_iter: 1,
        ..OptimizerConfig::default()
    };
    let rec = optimize(&off, &constraints, &config).unwrap().trace.records[0];
    let pass = (w1.accuracy, w1.sparse) == (0.75, 0.25)
        && (w2.accuracy, w2.sparse) == (0.01, 1.0)
        && rec.max_error > 0.5
        && (rec.ws, rec.wl) == (1.0, 0.0);
    outcome(
        pass,
        format!(
            "(3,1) -> ({}, {}); (0,5) -> ({}, {}); max error {:.2} forces ({}, {})",
            w1.accuracy, w1.sparse, w2.accuracy, w2.sparse, rec.max_error, rec.ws, rec.wl
        ),
    )
}

fn metric_identities() -> Outcome {
    let atoms = [
        Atom::new(1, Vec3::zeros(), 1.5),
        Atom::new(2, Vec3::new(1.4, 0.5, -0.3), 1.2),
    ];
    let field = GaussianField::new(&atoms, 0.5, 1.0).unwrap();
    let bbox = Aabb::new(Vec3::repeat(-4.0), Vec3::new(5.5, 4.5, 4.0));
    let report = compare_surfaces(&field, &field, &bbox, 0.25, 1.0).unwrap();
    let mesh = extract_isosurface(&field, &bbox, 0.25, 1.0).unwrap();
    let self_h = hausdorff(&mesh, &mesh, DEFAULT_SAMPLES_PER_TRIANGLE).unwrap();

    let cube = TriMesh::unit_cube();
    let cube_ok = (cube.area() - 6.0).abs() < 1e-12 && (cube.volume() - 1.0).abs() < 1e-12;

    let sphere = GaussianField::new(&[Atom::new(1, Vec3::zeros(), 1.5)], 0.5, 1.0).unwrap();
    let sphere_mesh = extract_isosurface(&sphere, &Aabb::cube(3.0), 0.1, 1.0).unwrap();
    // typical gap between neighbouring samples on a triangle
    let mean_edge = sphere_mesh
        .triangles
        .iter()
        .map(|t| (sphere_mesh.vertices[t[0]] - sphere_mesh.vertices[t[1]]).norm())
        .sum::<f64>()
        / sphere_mesh.triangles.len() as f64;
    let tolerance = mean_edge / ((DEFAULT_SAMPLES_PER_TRIANGLE + 1) as f64).sqrt();
    let mut translate_worst: f64 = 0.0;
    for t in [0.1, 0.5, 1.0] {
        let moved = sphere_mesh.translated(Vec3::new(t, 0.0, 0.0));
        let h = hausdorff(&sphere_mesh, &moved, DEFAULT_SAMPLES_PER_TRIANGLE).unwrap();
        translate_worst = translate_worst.max((h - t).abs());
    }

    let pass = self_h <= 1e-12
        && report.area_error == 0.0
        && report.volume_error == 0.0
        && cube_ok
        && translate_worst <= 2.0 * tolerance;
    outcome(
        pass,
        format!(
            "H(M,M) = {self_h:.1e}; Error_A = {}, Error_V = {}; cube area {} volume {}; \
             |H - t| <= {translate_worst:.4} (<= {:.4})",
            report.area_error,
            report.volume_error,
            cube.area(),
            cube.volume(),
            2.0 * tolerance
        ),
    )
}

fn model_bytes(run: &DialaRun) -> Option<(String, Vec<u8>)> {
    let fit = run.fit.as_ref().ok()?;
    let meta = ModelMetadata {
        source: "diala.pqr".into(),
        atom_count: run.molecule.len(),
        decay: 0.5,
        isovalue: 1.0,
        bounds: run.bbox,
        iterations: run.config.max_iter,
        sparse_iterations: run.config.sparse_iter,
        config: vec![("deterministic".into(), "true".into())],
    };
    let json = ModelDocument::new(&fit.model, meta).to_json().ok()?;
    let mut trace = Vec::new();
    fit.trace
        .write_csv(&mut trace, &["deterministic = true".into()])
        .ok()?;
    Some((json, trace))
}

fn determinism(first: &DialaRun, second: &DialaRun) -> Outcome {
    match (model_bytes(first), model_bytes(second)) {
        (Some(a), Some(b)) => outcome(
            a == b,
            format!(
                "model file {} bytes, trace file {} bytes, identical: {}",
                a.0.len(),
                a.1.len(),
                a == b
            ),
        ),
        _ => outcome(false, "a run failed".into()),
    }
}

fn main() -> ExitCode {
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |id: u32, name: &'static str, o: Outcome| {
        println!(
            "[{}] {id}. {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        results.push((id, name, o));
    };
    report(1, "exact start", exact_start());
    report(2, "gradient correctness", gradient_check());
    report(3, "single-kernel recovery", single_kernel_recovery());
    report(4, "sphere geometry", sphere_geometry());
    let run = run_diala(2000, 1500);
    report(5, "sparsification envelope", sparsification_envelope(&run));
    report(6, "trace properties", trace_properties(&run));
    report(7, "adaptive weight identities", weight_identities());
    report(8, "metric identities", metric_identities());
    let rerun = run_diala(2000, 1500);
    report(9, "determinism", determinism(&run, &rerun));

    let full = run_diala(8000, 6000);
    let info = sparsification_envelope(&full);
    println!(
        "[INFO] 5 at the default 8000/6000 schedule, not a criterion: {}",
        info.detail
    );

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!(
        "acceptance: {} passed, {} failed{}",
        results.len() - failed.len(),
        failed.len(),
        if failed.is_empty() {
            String::new()
        } else {
            format!(" ({failed:?})")
        }
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
