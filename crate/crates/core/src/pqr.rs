//! PQR ingestion.
//!
//! Records are read whitespace-delimited: the last five tokens of every
//! `ATOM`/`HETATM` line are `x y z charge radius`. Everything between the
//! serial and those five numbers is carried as labels, so files with and
//! without a chain identifier both parse.

use std::fmt::Write as _;
use std::path::Path;

use crate::{Error, Result, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub serial: i64,
    pub name: String,
    pub residue: String,
    /// Chain identifier, when the record carries one.
    pub chain: Option<String>,
    pub residue_seq: String,
    pub center: Vec3,
    /// Å
    pub radius: f64,
    /// Partial charge in e. Parsed for completeness, never used by the fit.
    pub charge: f64,
}

impl Atom {
    /// Minimal atom with placeholder labels.
    pub fn new(serial: i64, center: Vec3, radius: f64) -> Self {
        Self {
            serial,
            name: "X".into(),
            residue: "UNK".into(),
            chain: None,
            residue_seq: "1".into(),
            center,
            radius,
            charge: 0.0,
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidAtom {
                serial: self.serial,
                reason: "non-finite coordinate".into(),
            });
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::InvalidAtom {
                serial: self.serial,
                reason: format!("radius must be positive, got {}", self.radius),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Molecule {
    pub atoms: Vec<Atom>,
    pub source_path: String,
}

impl Molecule {
    /// Validates every atom and rejects empty input.
    pub fn new(atoms: Vec<Atom>, source_path: impl Into<String>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyMolecule);
        }
        for atom in &atoms {
            atom.validate()?;
        }
        Ok(Self {
            atoms,
            source_path: source_path.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn radius_range(&self) -> (f64, f64) {
        self.atoms
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| {
                (lo.min(a.radius), hi.max(a.radius))
            })
    }

    pub fn max_radius(&self) -> f64 {
        self.radius_range().1
    }

    /// Serialises back to whitespace-delimited PQR with round-trip exact numbers.
    pub fn to_pqr(&self) -> String {
        let mut out = String::new();
        for a in &self.atoms {
            let chain = a
                .chain
                .as_deref()
                .map(|c| format!(" {c}"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "ATOM  {:>5} {:<4} {:>3}{} {:>4} {} {} {} {} {}",
                a.serial,
                a.name,
                a.residue,
                chain,
                a.residue_seq,
                a.center.x,
                a.center.y,
                a.center.z,
                a.charge,
                a.radius
            );
        }
        out.push_str("END\n");
        out
    }
}

fn parse_number(token: &str, line: usize, what: &str) -> Result<f64> {
    token.parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {what} from {token:?}"),
    })
}

fn parse_record(tokens: &[&str], line: usize) -> Result<Atom> {
    // record keyword + serial + five numeric fields at minimum
    if tokens.len() < 7 {
        return Err(Error::Parse {
            line,
            message: format!("expected at least 7 fields, found {}", tokens.len()),
        });
    }
    let serial = tokens[1].parse::<i64>().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse serial from {:?}", tokens[1]),
    })?;
    let tail = &tokens[tokens.len() - 5..];
    let x = parse_number(tail[0], line, "x")?;
    let y = parse_number(tail[1], line, "y")?;
    let z = parse_number(tail[2], line, "z")?;
    let charge = parse_number(tail[3], line, "charge")?;
    let radius = parse_number(tail[4], line, "radius")?;

    let labels = &tokens[2..tokens.len() - 5];
    let label = |i: usize| labels.get(i).map(|s| s.to_string()).unwrap_or_default();
    let (name, residue, chain, residue_seq) = match labels.len() {
        0..=3 => (label(0), label(1), None, label(2)),
        _ => (label(0), label(1), Some(label(2)), labels[3..].join(" ")),
    };

    Ok(Atom {
        serial,
        name,
        residue,
        chain,
        residue_seq,
        center: Vec3::new(x, y, z),
        radius,
        charge,
    })
}

/// Parses PQR text. Non-record lines (REMARK, TER, END, blanks) are skipped.
pub fn parse_pqr(text: &str) -> Result<Molecule> {
    parse_pqr_named(text, "<memory>")
}

pub fn parse_pqr_named(text: &str, source_path: &str) -> Result<Molecule> {
    let mut atoms = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let tokens: Vec<&str> = raw.split_whitespace().collect();
        match tokens.first() {
            Some(&"ATOM") | Some(&"HETATM") => atoms.push(parse_record(&tokens, idx + 1)?),
            _ => continue,
        }
    }
    Molecule::new(atoms, source_path)
}

pub fn read_pqr(path: impl AsRef<Path>) -> Result<Molecule> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)?;
    parse_pqr_named(&text, &path.display().to_string())
}
