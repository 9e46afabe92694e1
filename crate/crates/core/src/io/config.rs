//! JSON run configuration. Parsing walks the document by hand so that every
//! problem is reported with its key path in a single pass.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::elasticity::ElasticParams;
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::frame_field::FrameField;
use crate::hydro::HydroParams;
use crate::lp::WeakMetricConfig;
use crate::sim::{init, DtPolicy, Model, RunOptions, SimState, DEFAULT_SAFETY};
use crate::spectral::{Grid2D, Vec2Field};

use super::snapshot::read_snapshot;

/// Default fraction of the CFL bound used as the step size.
pub const DEFAULT_DT_FRACTION: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ElasticConfig {
    #[serde(rename = "K")]
    pub k: [f64; 12],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HydroConfig {
    pub eta: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub beta3: f64,
    pub beta4: f64,
    pub beta5: f64,
    pub chi: [f64; 3],
    pub eta_rot: [f64; 3],
}

impl HydroConfig {
    pub fn params(&self) -> HydroParams {
        HydroParams {
            eta: self.eta,
            beta: [
                self.beta0, self.beta1, self.beta2, self.beta3, self.beta4, self.beta5,
            ],
            chi: self.chi,
            eta_rot: self.eta_rot,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepperConfig {
    pub safety: f64,
    /// Fixed step size; overrides `dt_fraction` when present.
    pub dt: Option<f64>,
    pub dt_fraction: f64,
    pub t_end: f64,
    pub sample_every: u64,
    /// Steps between snapshots; must be a multiple of `sample_every`.
    pub snapshot_every: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VelocityKind {
    Random,
    TaylorGreen,
    Zero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameInit {
    /// Peak rotation angle of the random perturbation of the base frame.
    pub amplitude: f64,
    pub max_mode: u32,
    /// Rotation vector taking the identity to the base frame.
    pub base_rotation: [f64; 3],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VelocityInit {
    pub kind: VelocityKind,
    pub amplitude: f64,
    pub max_mode: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InitialConfig {
    /// Load the initial state from a snapshot instead of generating it.
    pub snapshot: Option<PathBuf>,
    pub frame: FrameInit,
    pub velocity: VelocityInit,
}

/// A validated run configuration with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub elastic: ElasticConfig,
    pub hydro: HydroConfig,
    pub stepper: StepperConfig,
    pub initial: InitialConfig,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub besov_s: f64,
}

struct Reader {
    errors: Vec<String>,
}

impl Reader {
    fn object<'a>(&mut self, v: Option<&'a Value>, key: &str, required: bool) -> Option<&'a Map<String, Value>> {
        match v {
            None if required => {
                self.errors.push(format!("{key}: missing"));
                None
            }
            None => None,
            Some(Value::Object(m)) => Some(m),
            Some(other) => {
                self.errors.push(format!("{key}: expected an object, found {}", kind(other)));
                None
            }
        }
    }

    fn unknown(&mut self, m: &Map<String, Value>, prefix: &str, allowed: &[&str]) {
        for k in m.keys() {
            if !allowed.contains(&k.as_str()) {
                self.errors.push(format!("{}: unknown key", join(prefix, k)));
            }
        }
    }

    fn number(&mut self, m: Option<&Map<String, Value>>, prefix: &str, key: &str, default: Option<f64>) -> f64 {
        let path = join(prefix, key);
        match m.and_then(|m| m.get(key)) {
            Some(Value::Number(x)) => x.as_f64().unwrap_or(f64::NAN),
            Some(other) => {
                self.errors.push(format!("{path}: expected a number, found {}", kind(other)));
                f64::NAN
            }
            None => default.unwrap_or_else(|| {
                if m.is_some() {
                    self.errors.push(format!("{path}: missing"));
                }
                f64::NAN
            }),
        }
    }

    fn opt_number(&mut self, m: Option<&Map<String, Value>>, prefix: &str, key: &str) -> Option<f64> {
        match m.and_then(|m| m.get(key)) {
            None | Some(Value::Null) => None,
            Some(_) => Some(self.number(m, prefix, key, None)),
        }
    }

    fn uint(&mut self, m: Option<&Map<String, Value>>, prefix: &str, key: &str, default: Option<u64>) -> u64 {
        let path = join(prefix, key);
        match m.and_then(|m| m.get(key)) {
            Some(Value::Number(x)) if x.as_u64().is_some() => x.as_u64().unwrap_or(0),
            Some(other) => {
                self.errors
                    .push(format!("{path}: expected a non-negative integer, found {}", kind(other)));
                0
            }
            None => default.unwrap_or_else(|| {
                if m.is_some() {
                    self.errors.push(format!("{path}: missing"));
                }
                0
            }),
        }
    }

    fn array<const N: usize>(
        &mut self,
        m: Option<&Map<String, Value>>,
        prefix: &str,
        key: &str,
        default: Option<[f64; N]>,
    ) -> [f64; N] {
        let path = join(prefix, key);
        let mut out = [f64::NAN; N];
        match m.and_then(|m| m.get(key)) {
            Some(Value::Array(a)) if a.len() == N => {
                for (i, x) in a.iter().enumerate() {
                    match x.as_f64() {
                        Some(x) => out[i] = x,
                        None => self
                            .errors
                            .push(format!("{path}[{i}]: expected a number, found {}", kind(x))),
                    }
                }
            }
            Some(Value::Array(a)) => self
                .errors
                .push(format!("{path}: expected {N} entries, found {}", a.len())),
            Some(other) => self
                .errors
                .push(format!("{path}: expected an array of {N} numbers, found {}", kind(other))),
            None => match default {
                Some(d) => out = d,
                None if m.is_some() => self.errors.push(format!("{path}: missing")),
                None => {}
            },
        }
        out
    }

    fn positive(&mut self, path: &str, x: f64) {
        if !(x > 0.0 && x.is_finite()) && !x.is_nan() {
            self.errors.push(format!("{path}: {x} must be positive"));
        }
    }
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

impl RunConfig {
    /// Parses and validates a JSON document. All problems are collected into
    /// one configuration error.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::config(format!("invalid JSON: {e}")))?;
        let mut r = Reader { errors: Vec::new() };
        let Some(root) = r.object(Some(&doc), "<root>", true) else {
            return Err(Error::Configuration(r.errors));
        };
        r.unknown(
            root,
            "",
            &["grid", "elastic", "hydro", "stepper", "initial", "seed", "output_dir", "besov_s"],
        );

        let g = r.object(root.get("grid"), "grid", true);
        if let Some(g) = g {
            r.unknown(g, "grid", &["n", "L"]);
        }
        let n = r.uint(g, "grid", "n", None) as usize;
        let length = r.number(g, "grid", "L", None);

        let e = r.object(root.get("elastic"), "elastic", true);
        if let Some(e) = e {
            r.unknown(e, "elastic", &["K"]);
        }
        let k: [f64; 12] = r.array(e, "elastic", "K", None);
        for (i, &x) in k.iter().enumerate() {
            r.positive(&format!("elastic.K[{i}]"), x);
        }

        let h = r.object(root.get("hydro"), "hydro", true);
        if let Some(h) = h {
            r.unknown(
                h,
                "hydro",
                &["eta", "beta0", "beta1", "beta2", "beta3", "beta4", "beta5", "chi", "eta_rot"],
            );
        }
        let hydro = HydroConfig {
            eta: r.number(h, "hydro", "eta", None),
            beta0: r.number(h, "hydro", "beta0", None),
            beta1: r.number(h, "hydro", "beta1", None),
            beta2: r.number(h, "hydro", "beta2", None),
            beta3: r.number(h, "hydro", "beta3", None),
            beta4: r.number(h, "hydro", "beta4", None),
            beta5: r.number(h, "hydro", "beta5", None),
            chi: r.array(h, "hydro", "chi", None),
            eta_rot: r.array(h, "hydro", "eta_rot", None),
        };

        let s = r.object(root.get("stepper"), "stepper", false);
        if let Some(s) = s {
            r.unknown(
                s,
                "stepper",
                &["safety", "dt", "dt_fraction", "t_end", "sample_every", "snapshot_every"],
            );
        }
        let snapshot_every = match s.and_then(|s| s.get("snapshot_every")) {
            None | Some(Value::Null) => None,
            Some(_) => Some(r.uint(s, "stepper", "snapshot_every", None)),
        };
        let stepper = StepperConfig {
            safety: r.number(s, "stepper", "safety", Some(DEFAULT_SAFETY)),
            dt: r.opt_number(s, "stepper", "dt"),
            dt_fraction: r.number(s, "stepper", "dt_fraction", Some(DEFAULT_DT_FRACTION)),
            t_end: r.number(s, "stepper", "t_end", Some(1.0)),
            sample_every: r.uint(s, "stepper", "sample_every", Some(1)),
            snapshot_every,
        };
        r.positive("stepper.safety", stepper.safety);
        r.positive("stepper.t_end", stepper.t_end);
        if let Some(dt) = stepper.dt {
            r.positive("stepper.dt", dt);
        }
        if !(stepper.dt_fraction > 0.0 && stepper.dt_fraction <= 1.0) {
            r.errors.push(format!(
                "stepper.dt_fraction: {} must lie in (0, 1]",
                stepper.dt_fraction
            ));
        }
        if stepper.sample_every == 0 {
            r.errors.push("stepper.sample_every: must be at least 1".into());
        }
        if let Some(k) = stepper.snapshot_every {
            if k == 0 || (stepper.sample_every > 0 && k % stepper.sample_every != 0) {
                r.errors.push(format!(
                    "stepper.snapshot_every: {k} must be a positive multiple of stepper.sample_every"
                ));
            }
        }

        let i = r.object(root.get("initial"), "initial", false);
        if let Some(i) = i {
            r.unknown(i, "initial", &["snapshot", "frame", "velocity"]);
        }
        let snapshot = match i.and_then(|i| i.get("snapshot")) {
            None | Some(Value::Null) => None,
            Some(Value::String(p)) => Some(PathBuf::from(p)),
            Some(other) => {
                r.errors
                    .push(format!("initial.snapshot: expected a path string, found {}", kind(other)));
                None
            }
        };
        let fi = r.object(i.and_then(|i| i.get("frame")), "initial.frame", false);
        if let Some(fi) = fi {
            r.unknown(fi, "initial.frame", &["amplitude", "max_mode", "base_rotation"]);
        }
        let frame = FrameInit {
            amplitude: r.number(fi, "initial.frame", "amplitude", Some(0.5)),
            max_mode: r.uint(fi, "initial.frame", "max_mode", Some(2)) as u32,
            base_rotation: r.array(fi, "initial.frame", "base_rotation", Some([0.0; 3])),
        };
        let vi = r.object(i.and_then(|i| i.get("velocity")), "initial.velocity", false);
        if let Some(vi) = vi {
            r.unknown(vi, "initial.velocity", &["kind", "amplitude", "max_mode"]);
        }
        let vkind = match vi.and_then(|v| v.get("kind")) {
            None => VelocityKind::Random,
            Some(Value::String(s)) if s == "random" => VelocityKind::Random,
            Some(Value::String(s)) if s == "taylor_green" => VelocityKind::TaylorGreen,
            Some(Value::String(s)) if s == "zero" => VelocityKind::Zero,
            Some(other) => {
                r.errors.push(format!(
                    "initial.velocity.kind: expected one of \"random\", \"taylor_green\", \"zero\", found {other}"
                ));
                VelocityKind::Zero
            }
        };
        let velocity = VelocityInit {
            kind: vkind,
            amplitude: r.number(vi, "initial.velocity", "amplitude", Some(0.5)),
            max_mode: r.uint(vi, "initial.velocity", "max_mode", Some(2)) as u32,
        };
        if !(frame.amplitude >= 0.0) {
            r.errors
                .push(format!("initial.frame.amplitude: {} must be non-negative", frame.amplitude));
        }
        if !(velocity.amplitude >= 0.0) {
            r.errors.push(format!(
                "initial.velocity.amplitude: {} must be non-negative",
                velocity.amplitude
            ));
        }

        let seed = r.uint(Some(root), "", "seed", Some(0));
        let output_dir = match root.get("output_dir") {
            None => PathBuf::from("biaxframe-out"),
            Some(Value::String(p)) => PathBuf::from(p),
            Some(other) => {
                r.errors
                    .push(format!("output_dir: expected a path string, found {}", kind(other)));
                PathBuf::new()
            }
        };
        let besov_s = r.number(Some(root), "", "besov_s", Some(WeakMetricConfig::DEFAULT_S));
        if !(besov_s > 0.0 && besov_s < 0.5) {
            r.errors.push(format!("besov_s: {besov_s} must lie in (0, 1/2)"));
        }

        let cfg = RunConfig {
            grid: GridConfig { n, length },
            elastic: ElasticConfig { k },
            hydro,
            stepper,
            initial: InitialConfig {
                snapshot,
                frame,
                velocity,
            },
            seed,
            output_dir,
            besov_s,
        };

        // Model-level validators only run on well-typed input.
        if r.errors.is_empty() {
            if let Err(Error::Configuration(msgs)) = Grid2D::new(n, length) {
                r.errors.extend(msgs);
            }
            if let Err(vs) = cfg.hydro.params().validate() {
                r.errors.extend(vs.iter().map(|v| v.to_string()));
            }
        }
        if r.errors.is_empty() {
            Ok(cfg)
        } else {
            Err(Error::Configuration(r.errors))
        }
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.grid.n, self.grid.length)
    }

    pub fn elastic_params(&self) -> Result<ElasticParams> {
        ElasticParams::from_moduli(self.elastic.k)
    }

    pub fn hydro_params(&self) -> HydroParams {
        self.hydro.params()
    }

    pub fn model(&self) -> Result<Model> {
        Model::new(self.grid()?, self.elastic_params()?, self.hydro_params())?.with_safety(self.stepper.safety)
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            t_end: self.stepper.t_end,
            dt: match self.stepper.dt {
                Some(dt) => DtPolicy::Fixed(dt),
                None => DtPolicy::CflFraction(self.stepper.dt_fraction),
            },
            sample_every: self.stepper.sample_every,
        }
    }

    pub fn weak_metric_config(&self) -> Result<WeakMetricConfig> {
        WeakMetricConfig::new(self.besov_s)
    }

    /// Seeded generator shared by the initial-data and perturbation builders.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Builds (or loads) the initial state, drawing from `rng`.
    pub fn initial_state(&self, rng: &mut ChaCha8Rng) -> Result<SimState> {
        let grid = self.grid()?;
        if let Some(path) = &self.initial.snapshot {
            let s = read_snapshot(path)?;
            if s.grid() != grid {
                return Err(Error::config(format!(
                    "initial.snapshot: grid of {} does not match the configured grid",
                    path.display()
                )));
            }
            return Ok(s);
        }
        let base = Frame::rotated(&Frame::identity(), &Vector3::from(self.initial.frame.base_rotation));
        let f = &self.initial.frame;
        let frame = if f.amplitude > 0.0 {
            init::random_rotation_field(rng, grid, &base, f.amplitude, f.max_mode)
        } else {
            FrameField::uniform(grid, &base)
        };
        let v = &self.initial.velocity;
        let velocity = match v.kind {
            VelocityKind::Random => init::random_velocity(rng, grid, v.amplitude, v.max_mode),
            VelocityKind::TaylorGreen => init::taylor_green(grid, v.amplitude),
            VelocityKind::Zero => Vec2Field::zeros(grid),
        };
        SimState::new(frame, velocity)
    }

    /// Pretty JSON of the resolved configuration.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::from_json_str(&text)
}
