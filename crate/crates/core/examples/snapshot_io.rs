//! Snapshot round trip and the configuration-driven batch job, writing into a
//! temporary directory.

use biaxframe::io::{self, read_snapshot, write_snapshot, RunConfig};
use biaxframe::Result;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join(format!("biaxframe-example-{}", std::process::id()));
    let cfg = RunConfig::from_json_str(&format!(
        r#"{{
            "grid": {{"n": 16, "L": 6.283185307179586}},
            "elastic": {{"K": [1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1]}},
            "hydro": {{"eta": 1.0, "beta0": 0.0, "beta1": 1.0, "beta2": 1.0, "beta3": 1.0, "beta4": 1.0,
                       "beta5": 1.0, "chi": [1.0, 1.0, 1.0], "eta_rot": [0.5, 0.5, 0.5]}},
            "stepper": {{"t_end": 0.02, "sample_every": 5, "snapshot_every": 5}},
            "initial": {{"frame": {{"amplitude": 0.4, "max_mode": 2}},
                        "velocity": {{"kind": "taylor_green", "amplitude": 0.5}}}},
            "seed": 1,
            "output_dir": {:?}
        }}"#,
        dir
    ))?;
    let summary = io::run_job(&cfg)?;
    println!("{} steps, dt = {:.3e}, output in {}", summary.steps, summary.dt, summary.dir.display());

    let copy = dir.join("copy.bin");
    write_snapshot(&summary.final_state, &copy)?;
    let back = read_snapshot(&copy)?;
    println!("round trip exact: {}", back == summary.final_state);

    let first = dir.join("snapshots").join("state_00000000.bin");
    let m = io::lp_analyze(&first, &copy, 0.25)?;
    println!("initial vs final: phi = {:.6e}, u = {:.6e}, v = {:.6e}", m.phi, m.u, m.v);
    std::fs::remove_dir_all(&dir).map_err(|e| biaxframe::Error::Io { path: dir.clone(), source: e })?;
    Ok(())
}
