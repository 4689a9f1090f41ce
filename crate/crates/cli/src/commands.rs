use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use clap::Args;
use serde_json::{json, Map, Value};
use sparse_gauss::field::default_padding;
use sparse_gauss::optimizer::{energy_terms, max_pointwise_error};
use sparse_gauss::persist::{write_weights, ModelDocument, ModelMetadata};
use sparse_gauss::pqr::read_pqr;
use sparse_gauss::{
    bounding_box, compare_surfaces, extract_isosurface, init_model, make_grid, optimize,
    select_constraints, sparse_ratio, Error, GaussianField, IterationTrace, RbfModel, Result,
};

use crate::config::{header_lines, FieldArgs, FitArgs, DEFAULT_DECAY, DEFAULT_ISOVALUE};

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct MeshSource {
    /// Mesh the atom-based Gaussian surface.
    #[arg(long)]
    pub pqr: Option<String>,
    /// Mesh a fitted model document.
    #[arg(long)]
    pub model: Option<String>,
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::InvalidAtom { .. } | Error::EmptyMolecule => 2,
        Error::ModelCollapsed { .. }
        | Error::AllPruned { .. }
        | Error::NonFiniteObjective { .. } => 3,
        Error::EmptyMesh { .. } => 4,
        _ => 1,
    }
}

pub fn info(pqr: &str) -> Result<()> {
    let molecule = read_pqr(pqr)?;
    let bbox = bounding_box(&molecule, default_padding(&molecule));
    let (rmin, rmax) = molecule.radius_range();
    println!("N={}", molecule.len());
    println!("box_min={:?}", bbox.min);
    println!("box_max={:?}", bbox.max);
    println!("radius_min={rmin}");
    println!("radius_max={rmax}");
    Ok(())
}

fn config_object(pairs: &[(String, String)]) -> Value {
    Value::Object(
        pairs
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect::<Map<_, _>>(),
    )
}

fn write_text(
    path: &Path,
    fill: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    fill(&mut out)?;
    out.flush()?;
    Ok(())
}

fn write_fit_files(
    dir: &Path,
    model: &RbfModel,
    trace: &IterationTrace,
    header: &[String],
) -> Result<()> {
    write_text(&dir.join("trace.csv"), |w| trace.write_csv(w, header))?;
    write_text(&dir.join("weights.txt"), |w| {
        write_weights(model, w, header)
    })
}

pub fn sparsify(args: &FitArgs) -> Result<()> {
    let start = Instant::now();
    let molecule = read_pqr(&args.pqr)?;
    let field = GaussianField::from_molecule(&molecule, args.decay, args.isovalue)?;
    let bbox = bounding_box(&molecule, default_padding(&molecule));
    let constraints = select_constraints(
        &field,
        &make_grid(bbox, args.constraint_spacing)?,
        args.band,
    )?;
    let config = args.optimizer();
    config.validate()?;

    let pairs = args.effective();
    let header = header_lines(&pairs);
    let metadata = ModelMetadata {
        source: args.pqr.clone(),
        atom_count: molecule.len(),
        decay: args.decay,
        isovalue: args.isovalue,
        bounds: bbox,
        iterations: args.max_iter,
        sparse_iterations: args.sparse_iter,
        config: pairs.clone(),
    };
    let dir = Path::new(&args.out);
    fs::create_dir_all(dir)?;

    let fit = match optimize(
        &init_model(&molecule.atoms, args.decay),
        &constraints,
        &config,
    ) {
        Ok(fit) => fit,
        Err(failure) => {
            write_fit_files(dir, &failure.model, &failure.trace, &header)?;
            ModelDocument::new(&failure.model, metadata).save(dir.join("model.partial.json"))?;
            fs::write(dir.join("FAILED"), format!("{failure}\n"))?;
            return Err(failure.error);
        }
    };

    ModelDocument::new(&fit.model, metadata).save(dir.join("model.json"))?;
    write_fit_files(dir, &fit.model, &fit.trace, &header)?;

    let (es, _) = energy_terms(&fit.model, &constraints);
    let summary = json!({
        "config": config_object(&pairs),
        "N_atoms": molecule.len(),
        "N_ERBF": fit.model.len(),
        "S_r": sparse_ratio(fit.model.len(), molecule.len()),
        "constraints": constraints.len(),
        "iterations": fit.trace.len(),
        "E_s": es,
        "max_error": max_pointwise_error(&fit.model, &constraints),
        "wall_time_s": start.elapsed().as_secs_f64(),
    });
    let text = serde_json::to_string_pretty(&summary)?;
    fs::write(dir.join("summary.json"), format!("{text}\n"))?;
    println!("{text}");
    Ok(())
}

pub fn mesh(source: &MeshSource, field: &FieldArgs, spacing: f64, output: &str) -> Result<()> {
    let (mesh, mut header) = if let Some(pqr) = &source.pqr {
        let molecule = read_pqr(pqr)?;
        let decay = field.decay.unwrap_or(DEFAULT_DECAY);
        let isovalue = field.isovalue.unwrap_or(DEFAULT_ISOVALUE);
        let phi = GaussianField::from_molecule(&molecule, decay, isovalue)?;
        let bbox = bounding_box(&molecule, default_padding(&molecule));
        let mesh = extract_isosurface(&phi, &bbox, spacing, isovalue)?;
        (
            mesh,
            vec![
                format!("pqr = {pqr}"),
                format!("decay = {decay}"),
                format!("isovalue = {isovalue}"),
            ],
        )
    } else {
        let path = source.model.as_deref().expect("clap enforces one source");
        let doc = ModelDocument::load(path)?;
        let isovalue = field.isovalue.unwrap_or(doc.metadata.isovalue);
        let mesh = extract_isosurface(&doc.model(), &doc.metadata.bounds, spacing, isovalue)?;
        (
            mesh,
            vec![format!("model = {path}"), format!("isovalue = {isovalue}")],
        )
    };
    header.push(format!("mesh_spacing = {spacing}"));
    write_text(Path::new(output), |w| mesh.write_obj(w, &header))?;
    println!(
        "vertices={} triangles={}",
        mesh.vertices.len(),
        mesh.triangles.len()
    );
    Ok(())
}

pub fn compare(
    pqr: &str,
    model: &str,
    field: &FieldArgs,
    spacing: f64,
    output: Option<&str>,
) -> Result<()> {
    let molecule = read_pqr(pqr)?;
    let doc = ModelDocument::load(model)?;
    let decay = field.decay.unwrap_or(doc.metadata.decay);
    let isovalue = field.isovalue.unwrap_or(doc.metadata.isovalue);
    let phi = GaussianField::from_molecule(&molecule, decay, isovalue)?;
    let bbox = bounding_box(&molecule, default_padding(&molecule));
    let report = compare_surfaces(&phi, &doc.model(), &bbox, spacing, isovalue)?;

    let mut value = serde_json::to_value(report)?;
    let pairs: Vec<(String, String)> = [
        ("pqr", pqr.to_string()),
        ("model", model.to_string()),
        ("decay", decay.to_string()),
        ("isovalue", isovalue.to_string()),
        ("mesh_spacing", spacing.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    value["config"] = config_object(&pairs);
    let text = serde_json::to_string_pretty(&value)?;
    println!("{text}");
    if let Some(path) = output {
        fs::write(path, format!("{text}\n"))?;
    }
    Ok(())
}
