use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use log::info;
use vortlab::diagnostics::{Diagnostics, HolderFit};
use vortlab::io::{write_holder_series, Checkpoint, RunConfig, TimeseriesWriter};
use vortlab::solver::Solver;

use crate::CliResult;

#[derive(Debug, Clone)]
pub struct SimulateOutcome {
    pub records: usize,
    pub timeseries: PathBuf,
    pub checkpoints: Vec<PathBuf>,
}

pub fn checkpoint_name(step: u64) -> String {
    format!("checkpoint_{step:08}.vdl")
}

/// Runs the configured simulation, writing `timeseries.csv`, checkpoints
/// and (when Hölder fits are enabled) `holder_series.csv` into `out_dir`.
pub fn simulate(config: &RunConfig, out_dir: &Path) -> CliResult<SimulateOutcome> {
    let sim = config.sim_config()?;
    let nu = sim.nu;
    let solver = Solver::new(sim)?;
    let mut diag = Diagnostics::new(*solver.spectral().grid(), config.diagnostics_config())?;
    fs::create_dir_all(out_dir)?;
    let ts_path = out_dir.join("timeseries.csv");
    let mut ts = TimeseriesWriter::new(BufWriter::new(File::create(&ts_path)?), diag.config())?;
    let out = &config.output;
    let mut holder_rows: Vec<(f64, HolderFit)> = Vec::new();
    let mut checkpoints = Vec::new();
    let mut index = 0u64;
    info!("simulating {} steps of dt = {}", solver.steps(), solver.dt());
    let records = solver.run(|w| {
        let rec = diag.record(solver.spectral(), w, nu)?;
        ts.write(&rec)?;
        let state = w.current();
        let last = state.step_index == solver.steps();
        let cadence = out.checkpoint_every > 0 && index % out.checkpoint_every == 0;
        if out.checkpoints && (last || cadence) {
            let path = out_dir.join(checkpoint_name(state.step_index));
            Checkpoint::from_state(solver.spectral(), state, nu).save(&path)?;
            checkpoints.push(path);
        }
        if let Some(fit) = &rec.holder {
            holder_rows.push((rec.t, fit.clone()));
        }
        index += 1;
        Ok(())
    })?;
    ts.finish()?;
    if !holder_rows.is_empty() {
        write_holder_series(BufWriter::new(File::create(out_dir.join("holder_series.csv"))?), &holder_rows)?;
    }
    Ok(SimulateOutcome {
        records: records.len(),
        timeseries: ts_path,
        checkpoints,
    })
}
