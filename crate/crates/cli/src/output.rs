use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use domp::linalg::io::{read_matrix, read_vector};
use domp::linalg::{Matrix, Vector};

use crate::failure::{CliResult, Failure};

pub fn load_matrix(path: &Path) -> CliResult<Matrix> {
    let f = File::open(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    read_matrix(BufReader::new(f)).map_err(|e| Failure::from(e).context(path.display()))
}

pub fn load_vector(path: &Path) -> CliResult<Vector> {
    let f = File::open(path).map_err(|e| Failure::data(format!("{}: {e}", path.display())))?;
    read_vector(BufReader::new(f)).map_err(|e| Failure::from(e).context(path.display()))
}

/// File at `path`, or stdout.
pub fn sink(path: Option<&PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::data(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn emit_json(path: Option<&PathBuf>, value: &serde_json::Value) -> CliResult<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
