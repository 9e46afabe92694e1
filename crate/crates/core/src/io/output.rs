//! CSV time series. Numbers are written with 17 significant digits so that a
//! reread value is bit-identical to the one computed.

use std::path::Path;

use crate::error::{Error, Result};
use crate::hydro::EnergyLedger;
use crate::sim::MetricRow;

/// Columns of `energy.csv`.
pub const ENERGY_COLUMNS: [&str; 16] = [
    "t",
    "step",
    "kinetic",
    "elastic",
    "energy",
    "d_visc",
    "d_rot1",
    "d_rot2",
    "d_rot3",
    "d_beta12",
    "d_s3",
    "d_s4",
    "d_s5",
    "dissipation",
    "residual",
    "relative_residual",
];

/// Columns of `metrics.csv`.
pub const METRIC_COLUMNS: [&str; 5] = ["t", "phi", "u", "v", "f"];

/// Full-precision scientific formatting.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::io(path, e),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

fn write_rows(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(header).map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record(&r).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Relative residual with the absolute floor used throughout the crate.
pub fn relative_residual(l: &EnergyLedger) -> f64 {
    let de = l.residual - l.dissipation();
    l.relative_residual(de, 1e-12)
}

pub fn write_energy_csv(path: impl AsRef<Path>, ledger: &[EnergyLedger]) -> Result<()> {
    let rows = ledger.iter().map(|l| {
        let mut r = vec![fmt17(l.t), l.step.to_string()];
        r.extend(
            [l.kinetic, l.elastic, l.energy()]
                .into_iter()
                .chain(l.channels())
                .chain([l.dissipation(), l.residual, relative_residual(l)])
                .map(fmt17),
        );
        r
    });
    write_rows(path.as_ref(), &ENERGY_COLUMNS, rows)
}

pub fn write_metrics_csv(path: impl AsRef<Path>, rows: &[MetricRow]) -> Result<()> {
    let rows = rows
        .iter()
        .map(|m| [m.t, m.phi, m.u, m.v, m.f].into_iter().map(fmt17).collect());
    write_rows(path.as_ref(), &METRIC_COLUMNS, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_roundtrip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn metrics_header_is_stable() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        let row = MetricRow { t: 0.5, phi: 0.0, u: 0.0, v: 0.0, f: 1.0 };
        write_metrics_csv(&p, &[row]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("t,phi,u,v,f\n"));
        assert_eq!(text.lines().count(), 2);
    }
}
