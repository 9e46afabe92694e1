//! The batch jobs behind the command-line front end. Each writes a run
//! directory holding `config.json` (the resolved configuration),
//! `energy.csv`, `metrics.csv` and binary snapshots under `snapshots/`.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::hydro::Condition;
use crate::lp::{LittlewoodPaley, TwinDiff, WeakMetricConfig, WeakMetrics};
use crate::sim::{gronwall_constant, init, run, twin_run, MetricRow, SimState};
use crate::spectral::Spectral;

use super::config::RunConfig;
use super::output::{write_energy_csv, write_metrics_csv};
use super::snapshot::{read_snapshot, write_snapshot_with_params};

/// Coefficient conditions of a configuration, all of which hold when the
/// configuration parsed.
pub fn check_coeffs(cfg: &RunConfig) -> Vec<Condition> {
    cfg.hydro_params().conditions()
}

fn prepare_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.output_dir.clone();
    let snaps = dir.join("snapshots");
    fs::create_dir_all(&snaps).map_err(|e| Error::io(&snaps, e))?;
    let path = dir.join("config.json");
    fs::write(&path, cfg.to_json()).map_err(|e| Error::io(&path, e))?;
    Ok(dir)
}

fn params_record(cfg: &RunConfig) -> Value {
    serde_json::json!({ "elastic": cfg.elastic, "hydro": cfg.hydro })
}

fn snapshot_due(cfg: &RunConfig, step: u64) -> bool {
    cfg.stepper.snapshot_every.is_some_and(|k| step % k == 0)
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub final_state: SimState,
    pub steps: u64,
    pub dt: f64,
    /// Largest relative energy-balance residual over the samples.
    pub max_relative_residual: f64,
}

/// Single run. The metric series compares the state with itself, so Φ, U and
/// V are zero and only `F` carries information.
pub fn run_job(cfg: &RunConfig) -> Result<RunSummary> {
    let model = cfg.model()?;
    let mut rng = cfg.rng();
    let init = cfg.initial_state(&mut rng)?;
    let dir = prepare_dir(cfg)?;
    let params = params_record(cfg);
    let mut rows = Vec::new();
    let mut observer = |s: &SimState| -> Result<()> {
        rows.push(MetricRow {
            t: s.t,
            phi: 0.0,
            u: 0.0,
            v: 0.0,
            f: model.regularity_functional(s, s)?,
        });
        if snapshot_due(cfg, s.step) {
            let p = dir.join("snapshots").join(format!("state_{:08}.bin", s.step));
            write_snapshot_with_params(s, params.clone(), p)?;
        }
        Ok(())
    };
    let out = run(&model, init, &cfg.run_options(), &mut observer)?;
    write_energy_csv(dir.join("energy.csv"), &out.ledger)?;
    write_metrics_csv(dir.join("metrics.csv"), &rows)?;
    write_snapshot_with_params(&out.final_state, params, dir.join("snapshots").join("final.bin"))?;
    Ok(RunSummary {
        max_relative_residual: out
            .ledger
            .iter()
            .map(super::output::relative_residual)
            .fold(0.0, f64::max),
        steps: out.final_state.step,
        dt: out.dt,
        final_state: out.final_state,
        dir,
    })
}

#[derive(Clone, Debug)]
pub struct TwinSummary {
    pub dir: PathBuf,
    pub rows: Vec<MetricRow>,
    /// Fitted growth constant; `None` when `Φ(0) = 0`.
    pub gronwall: Option<f64>,
}

/// Twin experiment: the second state is the first perturbed by `eps`.
/// Writes `energy.csv` (first state), `energy_b.csv` and `metrics.csv`.
pub fn twin_job(cfg: &RunConfig, eps: f64) -> Result<TwinSummary> {
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::config(format!("--eps: {eps} must be a non-negative number")));
    }
    let model = cfg.model()?;
    let s_cfg = cfg.weak_metric_config()?;
    let mut rng = cfg.rng();
    let a0 = cfg.initial_state(&mut rng)?;
    let modes = cfg.initial.frame.max_mode.max(cfg.initial.velocity.max_mode).max(1);
    let b0 = init::perturbed_twin(&mut rng, &a0, eps, modes);
    let dir = prepare_dir(cfg)?;
    let params = params_record(cfg);
    let mut observer = |a: &SimState, b: &SimState| -> Result<()> {
        if snapshot_due(cfg, a.step) {
            for (tag, s) in [("a", a), ("b", b)] {
                let p = dir.join("snapshots").join(format!("{tag}_{:08}.bin", s.step));
                write_snapshot_with_params(s, params.clone(), p)?;
            }
        }
        Ok(())
    };
    let tw = twin_run(&model, a0, b0, &cfg.run_options(), &s_cfg, &mut observer)?;
    write_energy_csv(dir.join("energy.csv"), &tw.ledger_a)?;
    write_energy_csv(dir.join("energy_b.csv"), &tw.ledger_b)?;
    write_metrics_csv(dir.join("metrics.csv"), &tw.rows)?;
    for (tag, s) in [("a", &tw.a), ("b", &tw.b)] {
        write_snapshot_with_params(s, params.clone(), dir.join("snapshots").join(format!("{tag}_final.bin")))?;
    }
    Ok(TwinSummary {
        gronwall: gronwall_constant(&tw.rows).ok(),
        rows: tw.rows,
        dir,
    })
}

/// Weak metrics between two snapshots on the same grid.
pub fn lp_analyze(a: &Path, b: &Path, s: f64) -> Result<WeakMetrics> {
    let cfg = WeakMetricConfig::new(s)?;
    let sa = read_snapshot(a)?;
    let sb = read_snapshot(b)?;
    if sa.grid() != sb.grid() {
        return Err(Error::Dimension(format!(
            "{} and {} are on different grids",
            a.display(),
            b.display()
        )));
    }
    let sp = Spectral::new(sa.grid());
    let d = TwinDiff::new(&sp, &sa.frame, &sa.velocity, &sb.frame, &sb.velocity)?;
    let lp = LittlewoodPaley::new(sp)?;
    Ok(lp.weak_metrics(&d, &cfg))
}
