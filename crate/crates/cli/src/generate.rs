use std::fs::{self, File};
use std::io::BufWriter;

use serde_json::json;

use domp::bench::{generate_problem, EnsembleSpec, NoiseModel};
use domp::linalg::io::{write_matrix, write_vector};

use crate::args::GenerateArgs;
use crate::failure::{CliResult, Failure};
use crate::output::emit_json;

pub fn generate(args: &GenerateArgs) -> CliResult<()> {
    let spec = EnsembleSpec::new(args.m, args.n, args.k, args.seed)
        .with_scaling(args.column_scaling.into())
        .with_noise(NoiseModel::from_amplitude(args.noise));
    for w in spec.validate()? {
        eprintln!("warning: {w}");
    }
    let p = generate_problem(&spec, args.trial);
    fs::create_dir_all(&args.out_dir)?;
    let create = |name: &str| {
        let path = args.out_dir.join(name);
        File::create(&path)
            .map(BufWriter::new)
            .map_err(|e| Failure::data(format!("{}: {e}", path.display())))
    };
    write_matrix(create("matrix.txt")?, &p.a)?;
    write_vector(create("measurements.txt")?, &p.y)?;
    write_vector(create("truth.txt")?, &p.x)?;
    let support: Vec<usize> = (0..p.x.len())
        .filter(|&i| p.x[i] != 0.0)
        .map(|i| i + 1)
        .collect();
    emit_json(
        None,
        &json!({
            "ensemble": spec,
            "trial": args.trial,
            "support": support,
            "files": ["matrix.txt", "measurements.txt", "truth.txt"],
        }),
    )
}
