use crate::error::{Error, Result};
use crate::hydro::EnergyLedger;
use crate::lp::{LittlewoodPaley, TwinDiff, WeakMetricConfig};

use super::{Model, SimState, StepReport};

/// How the constant step size of a run is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// Fraction of [`Model::cfl_dt`] at the initial state.
    CflFraction(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub t_end: f64,
    pub dt: DtPolicy,
    /// Steps between samples of the ledger and the metrics.
    pub sample_every: u64,
}

impl RunOptions {
    fn resolve_dt(&self, model: &Model, s: &SimState) -> Result<(f64, u64)> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::config(format!(
                "stepper.t_end: {} must be positive",
                self.t_end
            )));
        }
        if self.sample_every == 0 {
            return Err(Error::config("stepper.sample_every: must be at least 1"));
        }
        let dt = match self.dt {
            DtPolicy::Fixed(dt) => dt,
            DtPolicy::CflFraction(f) => f * model.cfl_dt(s),
        };
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::config(format!("stepper: time step {dt} must be positive")));
        }
        let steps = (self.t_end / dt - 1e-9).ceil().max(1.0) as u64;
        Ok((self.t_end / steps as f64, steps))
    }

    fn is_sample(&self, n: u64, steps: u64) -> bool {
        n % self.sample_every == 0 || n == steps
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub final_state: SimState,
    pub dt: f64,
    /// Ledger at every sample, with the residual filled in.
    pub ledger: Vec<EnergyLedger>,
    /// Total energy at every step, index = step.
    pub energies: Vec<f64>,
    /// Per-step orthonormality reports.
    pub reports: Vec<StepReport>,
}

/// `dE/dt` at step `n` from the energy history: centered inside, one-sided
/// second order at the ends.
fn energy_rate(e: &[f64], n: usize, dt: f64) -> f64 {
    let last = e.len() - 1;
    if last < 2 {
        return if last == 0 { 0.0 } else { (e[1] - e[0]) / dt };
    }
    if n == 0 {
        (-3.0 * e[0] + 4.0 * e[1] - e[2]) / (2.0 * dt)
    } else if n == last {
        (3.0 * e[last] - 4.0 * e[last - 1] + e[last - 2]) / (2.0 * dt)
    } else {
        (e[n + 1] - e[n - 1]) / (2.0 * dt)
    }
}

fn fill_residuals(ledger: &mut [EnergyLedger], energies: &[f64], dt: f64) {
    for l in ledger.iter_mut() {
        let de = energy_rate(energies, l.step as usize, dt);
        l.residual = de + l.dissipation();
    }
}

/// Integrates one state to `t_end`. `observer` sees the state at every sample
/// (including the initial and final ones).
pub fn run(
    model: &Model,
    init: SimState,
    opts: &RunOptions,
    observer: &mut dyn FnMut(&SimState) -> Result<()>,
) -> Result<RunOutput> {
    let (dt, steps) = opts.resolve_dt(model, &init)?;
    let mut s = init;
    let first_step = s.step;
    let mut ledger = Vec::new();
    let mut energies = Vec::with_capacity(steps as usize + 1);
    let mut reports = Vec::with_capacity(steps as usize);
    for n in 0..steps {
        let (next, rep, mut l) = model.step_with_ledger(&s, dt)?;
        l.step = n;
        energies.push(l.energy());
        if opts.is_sample(n, steps) {
            observer(&s)?;
            ledger.push(l);
        }
        reports.push(rep);
        s = next;
    }
    let mut l = model.energy_report(&s)?;
    l.step = steps;
    energies.push(l.energy());
    observer(&s)?;
    ledger.push(l);
    fill_residuals(&mut ledger, &energies, dt);
    for l in ledger.iter_mut() {
        l.step += first_step;
    }
    Ok(RunOutput {
        final_state: s,
        dt,
        ledger,
        energies,
        reports,
    })
}

/// One sample of a twin experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricRow {
    pub t: f64,
    pub phi: f64,
    pub u: f64,
    pub v: f64,
    /// Regularity functional `F(t)`.
    pub f: f64,
}

#[derive(Clone, Debug)]
pub struct TwinRun {
    pub a: SimState,
    pub b: SimState,
    pub dt: f64,
    pub rows: Vec<MetricRow>,
    pub ledger_a: Vec<EnergyLedger>,
    pub ledger_b: Vec<EnergyLedger>,
}

/// Advances two states in lockstep with the same step size and evaluates the
/// weak metrics and `F(t)` at every sample.
pub fn twin_run(
    model: &Model,
    a0: SimState,
    b0: SimState,
    opts: &RunOptions,
    cfg: &WeakMetricConfig,
    observer: &mut dyn FnMut(&SimState, &SimState) -> Result<()>,
) -> Result<TwinRun> {
    if a0.grid() != model.grid() || b0.grid() != model.grid() {
        return Err(Error::Dimension("twin states must share the model grid".into()));
    }
    let lp = LittlewoodPaley::new(model.spectral().clone())?;
    let (dt, steps) = opts.resolve_dt(model, &a0)?;
    let (mut a, mut b) = (a0, b0);
    let mut rows = Vec::new();
    let (mut la, mut lb) = (Vec::new(), Vec::new());
    let (mut ea, mut eb) = (Vec::new(), Vec::new());
    let sample = |a: &SimState, b: &SimState| -> Result<MetricRow> {
        let d = TwinDiff::new(model.spectral(), &a.frame, &a.velocity, &b.frame, &b.velocity)?;
        let m = lp.weak_metrics(&d, cfg);
        Ok(MetricRow {
            t: a.t,
            phi: m.phi,
            u: m.u,
            v: m.v,
            f: model.regularity_functional(a, b)?,
        })
    };
    for n in 0..steps {
        let (na, _, mut l1) = model.step_with_ledger(&a, dt)?;
        let (nb, _, mut l2) = model.step_with_ledger(&b, dt)?;
        l1.step = n;
        l2.step = n;
        ea.push(l1.energy());
        eb.push(l2.energy());
        if opts.is_sample(n, steps) {
            observer(&a, &b)?;
            rows.push(sample(&a, &b)?);
            la.push(l1);
            lb.push(l2);
        }
        a = na;
        b = nb;
    }
    for (s, e, l) in [(&a, &mut ea, &mut la), (&b, &mut eb, &mut lb)] {
        let mut last = model.energy_report(s)?;
        last.step = steps;
        e.push(last.energy());
        l.push(last);
        fill_residuals(l, e, dt);
    }
    observer(&a, &b)?;
    rows.push(sample(&a, &b)?);
    Ok(TwinRun {
        a,
        b,
        dt,
        rows,
        ledger_a: la,
        ledger_b: lb,
    })
}

/// Smallest `C` with `log Φ(t) ≤ log Φ(0) + C ∫₀ᵗ F` at every sample, the
/// integral by the trapezoid rule over the samples.
pub fn gronwall_constant(rows: &[MetricRow]) -> Result<f64> {
    let first = rows
        .first()
        .ok_or_else(|| Error::UndefinedRatio("no samples".into()))?;
    if !(first.phi > 0.0) {
        return Err(Error::UndefinedRatio(format!(
            "Φ(0) = {} leaves the growth rate undefined",
            first.phi
        )));
    }
    let mut integral = 0.0;
    let mut c = f64::NEG_INFINITY;
    for w in rows.windows(2) {
        integral += 0.5 * (w[0].f + w[1].f) * (w[1].t - w[0].t);
        if integral > 0.0 {
            c = c.max((w[1].phi / first.phi).ln() / integral);
        }
    }
    if c == f64::NEG_INFINITY {
        return Err(Error::UndefinedRatio("fewer than two samples".into()));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_rate_is_exact_on_quadratics() {
        let dt = 0.1;
        let e: Vec<f64> = (0..6).map(|n| (n as f64 * dt).powi(2) + 1.0).collect();
        for n in 0..6 {
            assert!((energy_rate(&e, n, dt) - 2.0 * n as f64 * dt).abs() < 1e-12);
        }
    }

    #[test]
    fn gronwall_of_exponential() {
        let rows: Vec<MetricRow> = (0..11)
            .map(|i| {
                let t = i as f64 * 0.1;
                MetricRow { t, phi: (2.0 * t).exp(), u: 0.0, v: 0.0, f: 1.0 }
            })
            .collect();
        assert!((gronwall_constant(&rows).unwrap() - 2.0).abs() < 1e-12);
    }
}
