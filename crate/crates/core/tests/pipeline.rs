mod common;

use common::*;
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};
use sparse_gauss::field::default_padding;
use sparse_gauss::model::ObjectiveWeights;
use sparse_gauss::persist::{ModelDocument, ModelMetadata};
use sparse_gauss::*;

fn short_diala_fit() -> (Molecule, Aabb, ConstraintSet, Fit) {
    let molecule = diala();
    let field = GaussianField::from_molecule(&molecule, 0.5, 1.0).unwrap();
    let bbox = bounding_box(&molecule, default_padding(&molecule));
    let constraints = select_constraints(&field, &make_grid(bbox, 1.0).unwrap(), 1.0).unwrap();
    let config = OptimizerConfig {
        max_iter: 160,
        sparse_iter: 120,
        ..OptimizerConfig::default()
    };
    let fit = optimize(&init_model(&molecule.atoms, 0.5), &constraints, &config).unwrap();
    (molecule, bbox, constraints, fit)
}

#[test]
fn bundled_molecule_is_alanine_dipeptide() {
    let m = diala();
    assert_eq!(m.len(), 22);
    assert_eq!(m.radius_range(), (0.6, 1.908));
}

#[test]
fn reloaded_model_meshes_identically() {
    let (molecule, bbox, _, fit) = short_diala_fit();
    let meta = ModelMetadata {
        source: "diala.pqr".into(),
        atom_count: molecule.len(),
        decay: 0.5,
        isovalue: 1.0,
        bounds: bbox,
        iterations: 160,
        sparse_iterations: 120,
        config: vec![],
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    ModelDocument::new(&fit.model, meta).save(&path).unwrap();
    let doc = ModelDocument::load(&path).unwrap();
    assert_eq!(doc.model(), fit.model);
    let direct = extract_isosurface(&fit.model, &bbox, 0.5, 1.0).unwrap();
    let reloaded = extract_isosurface(&doc.model(), &doc.metadata.bounds, 0.5, 1.0).unwrap();
    assert_eq!(direct, reloaded);
}

#[test]
fn short_run_keeps_the_surface() {
    let (molecule, bbox, constraints, fit) = short_diala_fit();
    let field = GaussianField::from_molecule(&molecule, 0.5, 1.0).unwrap();
    assert!(fit.model.len() <= molecule.len());
    assert!(sparse_gauss::optimizer::max_pointwise_error(&fit.model, &constraints) < 1.0);
    let report = compare_surfaces(&field, &fit.model, &bbox, 0.5, 1.0).unwrap();
    assert!(
        report.area_error < 0.1 && report.volume_error < 0.1,
        "{report:?}"
    );
}

#[test]
fn single_atom_keeps_its_basis() {
    let atoms = [Atom::new(1, Vec3::new(1.0, -2.0, 0.5), 1.7)];
    let molecule = Molecule::new(atoms.to_vec(), "one").unwrap();
    let field = GaussianField::from_molecule(&molecule, 0.5, 1.0).unwrap();
    let bbox = bounding_box(&molecule, default_padding(&molecule));
    let constraints = select_constraints(&field, &make_grid(bbox, 1.0).unwrap(), 1.0).unwrap();
    let config = OptimizerConfig {
        max_iter: 600,
        sparse_iter: 400,
        ..OptimizerConfig::default()
    };
    let fit = optimize(&init_model(&atoms, 0.5), &constraints, &config).unwrap();
    assert_eq!(fit.model.len(), 1);
    assert_eq!(sparse_ratio(fit.model.len(), molecule.len()), 1.0);
}

#[test]
fn gradient_matches_finite_differences_on_small_instances() {
    let mut rng = StdRng::seed_from_u64(77);
    for _ in 0..10 {
        let n = rng.gen_range(1..=3);
        let model = RbfModel::new((0..n).map(|_| random_basis(&mut rng)).collect());
        let points: Vec<Vec3> = (0..30).map(|_| random_point(&mut rng, 3.0)).collect();
        let targets = (0..30).map(|_| rng.gen_range(0.0..2.0)).collect();
        let constraints = ConstraintSet::from_parts(points, targets).unwrap();
        let w = ObjectiveWeights::new(0.6, 0.4);
        let analytic = model.objective_gradient(&constraints, w);
        let numeric = fd_gradient(&model, &constraints, w, 1e-5);
        let f = objective(&model.pack(), n, &constraints, w);
        let err = max_relative_error(&analytic, &numeric, fd_noise(f, 1e-5) / 1e-5);
        assert!(err < 1e-5, "relative error {err}");
    }
}

fn arb_problem() -> impl Strategy<Value = (RbfModel, ConstraintSet)> {
    (any::<u64>(), 1usize..5, 5usize..60).prop_map(|(seed, n, m)| {
        let mut rng = StdRng::seed_from_u64(seed);
        let target = RbfModel::new((0..n + 1).map(|_| random_basis(&mut rng)).collect());
        let points: Vec<Vec3> = (0..m).map(|_| random_point(&mut rng, 3.0)).collect();
        let targets = target.eval_points(&points);
        let start = RbfModel::new((0..n).map(|_| random_basis(&mut rng)).collect());
        (start, ConstraintSet::from_parts(points, targets).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn trace_invariants((start, constraints) in arb_problem(), sparse_iter in 0usize..60) {
        let config = OptimizerConfig { max_iter: 60, sparse_iter, ..OptimizerConfig::default() };
        let (model, trace) = match optimize(&start, &constraints, &config) {
            Ok(fit) => (fit.model, fit.trace),
            Err(f) => (f.model, f.trace),
        };
        let r = &trace.records;
        prop_assert!(r.len() <= config.max_iter);
        for w in r.windows(2) {
            prop_assert!(w[1].nbasis <= w[0].nbasis);
            if w[1].nbasis < w[0].nbasis {
                prop_assert!(w[1].pruned > 0 && w[1].iter % config.prune_interval == 0);
            }
        }
        for x in r {
            prop_assert!([x.f, x.es, x.el1, x.ws, x.wl, x.tau, x.f_after].iter().all(|v| v.is_finite()));
            if x.tau > 0.0 {
                prop_assert!(x.f_after <= x.f);
            }
            if x.iter > config.sparse_iter {
                prop_assert_eq!((x.ws, x.wl), (1.0, 0.0));
            }
        }
        for b in &model.bases {
            prop_assert!(b.weight() >= 0.0 && b.decays().iter().all(|d| *d >= 0.0));
        }
    }

    #[test]
    fn pure_accuracy_never_raises_es((start, constraints) in arb_problem()) {
        let config = OptimizerConfig { max_iter: 40, sparse_iter: 0, ..OptimizerConfig::default() };
        let fit = optimize(&start, &constraints, &config).unwrap();
        for w in fit.trace.records.windows(2) {
            prop_assert!(w[1].es <= w[0].es);
        }
    }

    #[test]
    fn exact_start_on_random_molecules(seed in any::<u64>(), n in 1usize..30, decay in 0.3f64..0.9) {
        let mut rng = StdRng::seed_from_u64(seed);
        let atoms: Vec<Atom> = (0..n)
            .map(|i| Atom::new(i as i64, random_point(&mut rng, 5.0), rng.gen_range(0.5..2.2)))
            .collect();
        let field = GaussianField::new(&atoms, decay, 1.0).unwrap();
        let model = init_model(&atoms, decay);
        for _ in 0..200 {
            let p = random_point(&mut rng, 9.0);
            prop_assert!((model.eval(&p) - field.eval(&p)).abs() < 1e-10);
        }
    }
}
