//! Named experiments: JSON configuration, seed handling, assertions and
//! deterministic artifacts (CSV plus `metadata.json` and `config.json`).
//!
//! A run writes nothing that depends on the clock, the host or thread
//! scheduling, so the same configuration and seed reproduce every artifact
//! byte for byte.

mod experiments;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::{Error, Result};

/// Environment variable naming the default output root.
pub const OUTPUT_ENV: &str = "BOHMLAB_OUT";
/// Output root when neither `--out`, the config nor the environment name one.
pub const DEFAULT_OUTPUT_ROOT: &str = "bohmlab-out";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;
pub const EXIT_RUNTIME: i32 = 4;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExperimentInfo {
    pub name: &'static str,
    pub description: &'static str,
    /// Topic the experiment realizes.
    pub reference: &'static str,
}

const CATALOG: [ExperimentInfo; 9] = [
    ExperimentInfo {
        name: "two-slit",
        description: "Bohmian trajectories through a two-slit barrier; screen histogram and trajectory bundle",
        reference: "particle guidance: a trajectory passes one slit while the wave passes both",
    },
    ExperimentInfo {
        name: "pointer",
        description: "von Neumann pointer measurement of a superposition; outcome frequencies vs Born weights",
        reference: "probability rule: outcomes recorded by the position of a macroscopic pointer",
    },
    ExperimentInfo {
        name: "equivariance-particle",
        description: "Born-sampled ensemble under free-packet spreading; histogram L1 vs |psi(t)|^2",
        reference: "equivariance: a |psi|^2 ensemble stays |psi|^2 distributed",
    },
    ExperimentInfo {
        name: "equivariance-field",
        description: "Bohmian field ensemble on a lattice; per-mode moments vs |Psi(t)|^2",
        reference: "field ontology: probability of a field configuration",
    },
    ExperimentInfo {
        name: "fock-spectrum",
        description: "brute-force lattice spectrum vs the phonon Fock tower sum hbar*omega_k(n_k + 1/2)",
        reference: "phonons: the lattice Hamiltonian as a sum of independent oscillators",
    },
    ExperimentInfo {
        name: "dispersion-scan",
        description: "chain dispersion linearity and boost invariance of the lattice two-point function",
        reference: "emergent relativity: long-wavelength wave equation and sound-cone boosts",
    },
    ExperimentInfo {
        name: "gauge-invariance",
        description: "random gauge transforms of a Coulomb-gauge history; E and B unchanged, instantaneous phi",
        reference: "ontic potentials: Coulomb gauge and instantaneous action at a distance",
    },
    ExperimentInfo {
        name: "frame-report",
        description: "field equivariance in the preferred frame plus correlator boost invariance, one verdict",
        reference: "preferred frame: measurable predictions do not depend on the frame",
    },
    ExperimentInfo {
        name: "noncovariance-demo",
        description: "boosted Bohmian field history vs the history generated in the boosted frame",
        reference: "preferred frame: trajectories are frame dependent, predictions are not",
    },
];

/// All experiments in a fixed order.
pub fn list_experiments() -> &'static [ExperimentInfo] {
    &CATALOG
}

pub fn find_experiment(name: &str) -> Result<&'static ExperimentInfo> {
    CATALOG.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownExperiment(name.to_string()))
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Must match the experiment being run, if given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Experiment parameters; missing keys take their defaults.
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// One invocation: the config file plus command-line overrides, which win.
#[derive(Clone, Debug, Default)]
pub struct RunRequest {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub seed: Option<u64>,
    /// Individual parameter overrides.
    pub params: Map<String, Value>,
    pub output: Option<PathBuf>,
}

impl RunRequest {
    pub fn new(experiment: &str) -> Self {
        RunRequest { experiment: experiment.to_string(), ..Default::default() }
    }

    pub fn with_output(mut self, dir: impl Into<PathBuf>) -> Self {
        self.output = Some(dir.into());
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerance {
    pub name: String,
    pub value: f64,
    /// Where the default comes from.
    pub source: String,
    pub overridden: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metadata {
    pub experiment: String,
    pub version: String,
    pub seed: Option<u64>,
    pub params: Value,
    pub tolerances: Vec<Tolerance>,
    pub assertions: Vec<Assertion>,
    pub warnings: Vec<String>,
    pub artifacts: Vec<String>,
    pub passed: bool,
    /// Rerun with `run <experiment> --config <dir>/config.json`.
    pub reproduce: String,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub output: PathBuf,
    pub metadata: Metadata,
}

impl RunOutcome {
    pub fn passed(&self) -> bool {
        self.metadata.passed
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.metadata.assertions.iter().find(|a| a.name == name)
    }

    pub fn artifact(&self, name: &str) -> PathBuf {
        self.output.join(name)
    }
}

/// Default output root: `$BOHMLAB_OUT` or `./bohmlab-out`.
pub fn default_output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT_ROOT))
}

/// Process exit status for a run result.
pub fn exit_code(result: &Result<RunOutcome>) -> i32 {
    match result {
        Ok(o) if o.passed() => EXIT_PASS,
        Ok(_) => EXIT_ASSERTION,
        Err(e) => error_exit_code(e),
    }
}

/// Bad input is a configuration problem; the rest happened while running.
pub fn error_exit_code(e: &Error) -> i32 {
    match e {
        Error::UnknownExperiment(_) => EXIT_UNKNOWN,
        Error::Config(_)
        | Error::InvalidInput(_)
        | Error::Shape(_)
        | Error::Unsupported(_)
        | Error::SizeCap { .. }
        | Error::ZeroMode
        | Error::NonNeutral { .. }
        | Error::NeedsHistory(_)
        | Error::NonNormalizable(..)
        | Error::OutOfRange(_) => EXIT_CONFIG,
        _ => EXIT_RUNTIME,
    }
}

pub fn run(req: &RunRequest) -> Result<RunOutcome> {
    let info = find_experiment(&req.experiment)?;
    if let Some(name) = &req.config.experiment {
        if name != info.name {
            return Err(Error::Config(format!("config is for `{name}`, not `{}`", info.name)));
        }
    }
    use experiments::*;
    match info.name {
        "two-slit" => drive::<TwoSlit>(info, req),
        "pointer" => drive::<Pointer>(info, req),
        "equivariance-particle" => drive::<ParticleEquivariance>(info, req),
        "equivariance-field" => drive::<FieldEquivariance>(info, req),
        "fock-spectrum" => drive::<FockSpectrum>(info, req),
        "dispersion-scan" => drive::<DispersionScan>(info, req),
        "gauge-invariance" => drive::<GaugeInvariance>(info, req),
        "frame-report" => drive::<FrameReport>(info, req),
        "noncovariance-demo" => drive::<Noncovariance>(info, req),
        other => Err(Error::UnknownExperiment(other.to_string())),
    }
}

/// Overridable tolerance: name, default, source of the default.
type ToleranceSpec = (&'static str, f64, &'static str);

trait Experiment {
    type Params: Serialize + DeserializeOwned;
    const TOLERANCES: &'static [ToleranceSpec];
    fn seed(p: &Self::Params) -> Option<u64>;
    /// Returns false when the experiment draws no random numbers.
    fn reseed(p: &mut Self::Params, seed: u64) -> bool;
    fn execute(p: &Self::Params, ctx: &mut Context) -> Result<()>;
}

fn drive<E: Experiment>(info: &ExperimentInfo, req: &RunRequest) -> Result<RunOutcome> {
    let mut raw = req.config.params.clone();
    raw.extend(req.params.clone());
    let mut params: E::Params = serde_json::from_value(Value::Object(raw)).map_err(|e| Error::Config(format!("params: {e}")))?;
    let mut warnings = Vec::new();
    if let Some(seed) = req.seed.or(req.config.seed) {
        if !E::reseed(&mut params, seed) {
            warnings.push(format!("seed {seed} ignored: {} is deterministic without one", info.name));
        }
    }
    let mut tolerances: Vec<Tolerance> = E::TOLERANCES
        .iter()
        .map(|&(name, value, source)| Tolerance { name: name.into(), value, source: source.into(), overridden: false })
        .collect();
    for (name, &value) in &req.config.tolerances {
        let t = tolerances
            .iter_mut()
            .find(|t| &t.name == name)
            .ok_or_else(|| Error::Config(format!("{} has no tolerance `{name}`", info.name)))?;
        if !value.is_finite() {
            return Err(Error::Config(format!("tolerance `{name}` must be finite")));
        }
        t.value = value;
        t.overridden = true;
    }

    let output = req
        .output
        .clone()
        .or_else(|| req.config.output.clone())
        .unwrap_or_else(|| default_output_root().join(info.name));
    std::fs::create_dir_all(&output)?;
    let mut ctx = Context { dir: output.clone(), tolerances, assertions: Vec::new(), artifacts: Vec::new(), warnings };
    E::execute(&params, &mut ctx)?;

    let params_value = serde_json::to_value(&params)?;
    let seed = E::seed(&params);
    let replay = ExperimentConfig {
        experiment: Some(info.name.to_string()),
        seed,
        output: None,
        params: match &params_value {
            Value::Object(m) => m.clone(),
            _ => Map::new(),
        },
        tolerances: ctx
            .tolerances
            .iter()
            .filter(|t| E::TOLERANCES.iter().any(|s| s.0 == t.name))
            .map(|t| (t.name.clone(), t.value))
            .collect(),
    };
    ctx.json("config.json", &replay)?;
    let mut artifacts = ctx.artifacts.clone();
    artifacts.push("metadata.json".into());
    artifacts.sort();
    let metadata = Metadata {
        experiment: info.name.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        params: params_value,
        tolerances: ctx.tolerances,
        passed: !ctx.assertions.is_empty() && ctx.assertions.iter().all(|a| a.passed),
        assertions: ctx.assertions,
        warnings: ctx.warnings,
        artifacts,
        reproduce: format!("bohmlab run {} --config config.json", info.name),
    };
    write_json(&output.join("metadata.json"), &metadata)?;
    Ok(RunOutcome { output, metadata })
}

fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Collects assertions and artifacts while an experiment runs.
struct Context {
    dir: PathBuf,
    tolerances: Vec<Tolerance>,
    assertions: Vec<Assertion>,
    artifacts: Vec<String>,
    warnings: Vec<String>,
}

impl Context {
    fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.iter().find(|t| t.name == name).map(|t| t.value).expect("tolerance declared by the experiment")
    }

    /// Records a fixed threshold that is reported but not overridable.
    fn report_threshold(&mut self, name: &str, value: f64, source: &str) {
        self.tolerances.push(Tolerance { name: name.into(), value, source: source.into(), overridden: false });
    }

    fn check(&mut self, name: &str, value: f64, relation: &'static str, bound: f64) -> bool {
        let passed = match relation {
            "<" => value < bound,
            "<=" => value <= bound,
            ">" => value > bound,
            ">=" => value >= bound,
            "==" => value == bound,
            _ => unreachable!("unknown relation {relation}"),
        };
        self.assertions.push(Assertion { name: name.into(), value, relation, bound, passed });
        passed
    }

    fn holds(&mut self, name: &str, condition: bool) -> bool {
        self.check(name, if condition { 1.0 } else { 0.0 }, "==", 1.0)
    }

    fn warn(&mut self, text: impl Into<String>) {
        self.warnings.push(text.into());
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        if !self.artifacts.iter().any(|a| a == name) {
            self.artifacts.push(name.into());
        }
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    fn csv(&mut self, name: &str) -> Result<csv::Writer<BufWriter<File>>> {
        Ok(csv::Writer::from_writer(self.create(name)?))
    }

    fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }
}
