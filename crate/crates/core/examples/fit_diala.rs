//! Fits the bundled alanine dipeptide and prints the surface comparison.

use std::time::Instant;

use sparse_gauss::field::default_padding;
use sparse_gauss::pqr::read_pqr;
use sparse_gauss::*;

fn main() -> Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let max_iter = args.get(1).map_or(2000, |s| s.parse().unwrap());
    let sparse_iter = args.get(2).map_or(1500, |s| s.parse().unwrap());
    let molecule = read_pqr(concat!(env!("CARGO_MANIFEST_DIR"), "/data/diala.pqr"))?;
    let field = GaussianField::from_molecule(&molecule, 0.5, 1.0)?;
    let bbox = bounding_box(&molecule, default_padding(&molecule));
    let constraints = select_constraints(&field, &make_grid(bbox, 1.0)?, 1.0)?;
    println!("atoms {} constraints {}", molecule.len(), constraints.len());

    let start = Instant::now();
    let config = OptimizerConfig {
        max_iter,
        sparse_iter,
        ..Default::default()
    };
    let fit =
        optimize(&init_model(&molecule.atoms, 0.5), &constraints, &config).map_err(|f| f.error)?;
    for r in fit.trace.records.iter().step_by(100) {
        println!(
            "{:5} f {:.4e} Es {:.4e} El1 {:.4e} ws {:.3} wl {:.3} n {:3} tau {:.2e} maxerr {:.3}",
            r.iter, r.f, r.es, r.el1, r.ws, r.wl, r.nbasis, r.tau, r.max_error
        );
    }
    let report = compare_surfaces(&field, &fit.model, &bbox, 0.5, 1.0)?;
    println!("elapsed {:.1?}", start.elapsed());
    println!("S_r {:.4}", sparse_ratio(fit.model.len(), molecule.len()));
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    Ok(())
}
