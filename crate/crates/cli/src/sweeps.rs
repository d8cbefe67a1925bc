use std::fs::File;
use std::io::{BufWriter, Write};

use domp::algorithms::Algorithm;
use domp::bench::{
    gamma_sweep, iteration_sweep, scaling_benchmark, sidecar, success_curves, write_csv,
    write_timing_csv, NoiseModel, Preset, SweepResult, SweepSettings,
};

use crate::args::{PhaseGammaArgs, PhaseItersArgs, PhaseKArgs, ScalingArgs, ShapeArgs, SweepArgs};
use crate::failure::{CliResult, Failure};
use crate::output::{emit_json, sink};

fn settings(args: &SweepArgs, preset: Preset, sweep: &str) -> SweepSettings {
    let mut s = SweepSettings::new(
        args.seed,
        args.trials.unwrap_or_else(|| preset.trials(sweep)),
    )
    .with_noise(NoiseModel::from_amplitude(args.noise))
    .with_threads(args.threads);
    s.scaling = args.column_scaling.into();
    s.success_threshold = args.success_threshold;
    s.group_size = args.group_size;
    s
}

fn algorithms(args: &SweepArgs, default: Vec<Algorithm>) -> Vec<Algorithm> {
    args.algos.clone().unwrap_or(default)
}

fn apply_shape(
    shape: &ShapeArgs,
    m: &mut usize,
    n: &mut usize,
    ks: &mut Vec<usize>,
) -> CliResult<()> {
    if let Some(v) = shape.m {
        *m = v;
    }
    if let Some(v) = shape.n {
        *n = v;
    }
    if let Some(v) = &shape.ks {
        if v.is_empty() || v.contains(&0) {
            return Err(Failure::usage("--ks needs positive sparsity levels"));
        }
        *ks = v.clone();
    }
    Ok(())
}

fn write_outputs(args: &SweepArgs, result: &SweepResult) -> CliResult<()> {
    let mut out = sink(args.output.as_ref())?;
    write_csv(result, &mut out)?;
    out.flush()?;
    if let Some(p) = &args.timing {
        let f = File::create(p).map_err(|e| Failure::data(format!("{}: {e}", p.display())))?;
        write_timing_csv(result, BufWriter::new(f))?;
    }
    if let Some(p) = &args.sidecar {
        emit_json(Some(p), &sidecar(result))?;
    }
    Ok(())
}

pub fn phase_gamma(args: &PhaseGammaArgs) -> CliResult<()> {
    let preset: Preset = args.sweep.preset.into();
    let mut grid = preset.gamma_sweep();
    apply_shape(&args.shape, &mut grid.m, &mut grid.n, &mut grid.ks)?;
    if let Some(g) = &args.gammas {
        grid.gammas = g.clone();
    }
    grid.algorithms = algorithms(&args.sweep, grid.algorithms);
    let result = gamma_sweep(&grid, &settings(&args.sweep, preset, "phase-gamma"))?;
    write_outputs(&args.sweep, &result)
}

pub fn phase_iters(args: &PhaseItersArgs) -> CliResult<()> {
    let preset: Preset = args.sweep.preset.into();
    let mut grid = preset.iteration_sweep();
    apply_shape(&args.shape, &mut grid.m, &mut grid.n, &mut grid.ks)?;
    if let Some(b) = &args.budgets {
        grid.budgets = b.clone();
    }
    grid.gamma = args.gamma;
    grid.algorithms = algorithms(&args.sweep, grid.algorithms);
    let result = iteration_sweep(&grid, &settings(&args.sweep, preset, "phase-iters"))?;
    write_outputs(&args.sweep, &result)
}

pub fn phase_k(args: &PhaseKArgs) -> CliResult<()> {
    let preset: Preset = args.sweep.preset.into();
    let mut grid = preset.sparsity_sweep();
    apply_shape(&args.shape, &mut grid.m, &mut grid.n, &mut grid.ks)?;
    grid.gamma = args.gamma;
    grid.algorithms = algorithms(&args.sweep, grid.algorithms);
    let result = success_curves(&grid, &settings(&args.sweep, preset, "phase-k"))?;
    write_outputs(&args.sweep, &result)
}

pub fn scaling(args: &ScalingArgs) -> CliResult<()> {
    let preset: Preset = args.sweep.preset.into();
    let mut grid = preset.scaling_sweep();
    if let Some(s) = &args.sizes {
        if s.is_empty() || s.contains(&0) {
            return Err(Failure::usage("--sizes needs positive row counts"));
        }
        grid.ms = s.clone();
    }
    grid.gamma = args.gamma;
    grid.algorithms = algorithms(&args.sweep, grid.algorithms);
    let settings = settings(&args.sweep, preset, "scaling").with_timing_repeats(args.repeats);
    let result = scaling_benchmark(&grid, &settings)?;
    write_outputs(&args.sweep, &result)
}
