//! Scenario configs and runners. Each config is one JSON document; file
//! paths inside it are relative to the config's directory.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use qinfer::inference::{
    attaining_measurement, best_projective_success, check_bound, discriminate, monte_carlo_variance,
    MonteCarloConfig,
};
use qinfer::io::{fmt_f64, matrix_to_json, ChannelFile, ModelSpec, PovmFile, StateFile};
use qinfer::measurements::{qubit_projective, triad};
use qinfer::models::{spin_half_longitude_model, ParametricModel};
use qinfer::tomography::{apply_channel, behavioral_distance, channel_from_choi, choi_state, Channel};
use qinfer::{random, DensityMatrix, Povm};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CliError, CliResult};

/// Settings shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
}

/// Parameter grid: an explicit list or `points` evenly spaced values from
/// `start` to `stop` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Linspace { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        let v = match self {
            Grid::List(v) => v.clone(),
            Grid::Linspace { start, stop, points } => match points {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|k| {
                        if k == n - 1 {
                            *stop
                        } else {
                            start + (stop - start) * k as f64 / (n - 1) as f64
                        }
                    })
                    .collect(),
            },
        };
        if v.is_empty() {
            return Err(CliError::Config("grid is empty".into()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config("grid values must be finite".into()));
        }
        Ok(v)
    }
}

/// How the measurement is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasurementSpec {
    /// Eigenprojectors of the quantum score, at `at` or else at each
    /// evaluation point.
    Attaining {
        #[serde(default)]
        at: Option<f64>,
    },
    /// Qubit projective measurement along a Bloch direction.
    Projective { direction: [f64; 3] },
    Triad,
    Povm {
        #[serde(flatten)]
        povm: PovmFile,
    },
    File { path: PathBuf },
}

impl MeasurementSpec {
    fn resolve(&self, model: Option<&ParametricModel>, theta: f64, base: &Path) -> CliResult<Povm> {
        Ok(match self {
            MeasurementSpec::Attaining { at } => {
                let model = model.ok_or_else(|| CliError::Config("attaining measurement needs a model".into()))?;
                attaining_measurement(model, at.unwrap_or(theta))?
            }
            MeasurementSpec::Projective { direction } => qubit_projective(*direction)?,
            MeasurementSpec::Triad => triad(),
            MeasurementSpec::Povm { povm } => povm.to_povm()?,
            MeasurementSpec::File { path } => read_json::<PovmFile>(&base.join(path))?.to_povm()?,
        })
    }

    fn is_pointwise(&self) -> bool {
        matches!(self, MeasurementSpec::Attaining { at: None })
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn base_dir(config: &Path) -> PathBuf {
    config.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn write_output(out_dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(out_dir).map_err(|source| CliError::Write {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let path = out_dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Write {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

// ---------------------------------------------------------------- qfi-sweep

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QfiSweepConfig {
    /// Model for a θ sweep. Ignored when `eta` is present.
    #[serde(default)]
    pub model: Option<ModelSpec>,
    pub theta: Grid,
    /// Colatitudes for a sweep of the spin-half longitude model.
    #[serde(default)]
    pub eta: Option<Grid>,
    pub measurement: MeasurementSpec,
    #[serde(default = "default_sweep_output")]
    pub output: String,
}

fn default_sweep_output() -> String {
    "qfi_sweep.csv".into()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub eta: Option<f64>,
    pub theta: f64,
    pub fisher: f64,
    pub quantum: f64,
    pub gap: f64,
}

pub fn qfi_sweep(cfg: &QfiSweepConfig, base: &Path) -> CliResult<Vec<SweepRow>> {
    let thetas = cfg.theta.values()?;
    let points: Vec<(Option<f64>, f64)> = match &cfg.eta {
        Some(eta) => {
            let etas = eta.values()?;
            etas.iter().flat_map(|&e| thetas.iter().map(move |&t| (Some(e), t))).collect()
        }
        None => thetas.iter().map(|&t| (None, t)).collect(),
    };
    let fixed_model = match (&cfg.eta, &cfg.model) {
        (Some(_), _) => None,
        (None, Some(spec)) => Some(spec.build()?),
        (None, None) => return Err(CliError::Config("either `model` or `eta` is required".into())),
    };
    let fixed_m = if cfg.measurement.is_pointwise() || cfg.eta.is_some() {
        None
    } else {
        Some(cfg.measurement.resolve(fixed_model.as_ref(), thetas[0], base)?)
    };

    points
        .par_iter()
        .map(|&(eta, theta)| {
            let model = match eta {
                Some(e) => spin_half_longitude_model(e),
                None => fixed_model.clone().expect("model present"),
            };
            let m = match &fixed_m {
                Some(m) => m.clone(),
                None => cfg.measurement.resolve(Some(&model), theta, base)?,
            };
            let rep = check_bound(&model, theta, &m)?;
            Ok(SweepRow {
                eta,
                theta,
                fisher: rep.fisher,
                quantum: rep.quantum,
                gap: rep.gap,
            })
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let with_eta = rows.first().is_some_and(|r| r.eta.is_some());
    let mut s = String::from(if with_eta { "eta,theta,i,I,gap\n" } else { "theta,i,I,gap\n" });
    for r in rows {
        if let Some(e) = r.eta {
            s.push_str(&fmt_f64(e));
            s.push(',');
        }
        s.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(r.theta),
            fmt_f64(r.fisher),
            fmt_f64(r.quantum),
            fmt_f64(r.gap)
        ));
    }
    s
}

pub fn run_qfi_sweep(opts: &RunOptions) -> CliResult<Vec<PathBuf>> {
    let cfg: QfiSweepConfig = read_json(&opts.config)?;
    let rows = qfi_sweep(&cfg, &base_dir(&opts.config))?;
    Ok(vec![write_output(&opts.out_dir, &cfg.output, &sweep_csv(&rows))?])
}

// ------------------------------------------------------------- discriminate

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSource {
    File { file: PathBuf },
    Inline(StateFile),
}

impl StateSource {
    fn load(&self, base: &Path) -> CliResult<DensityMatrix> {
        Ok(match self {
            StateSource::File { file } => read_json::<StateFile>(&base.join(file))?.to_state()?,
            StateSource::Inline(s) => s.to_state()?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscriminationConfig {
    pub states: Vec<StateSource>,
    /// Uniform when absent.
    #[serde(default)]
    pub priors: Option<Vec<f64>>,
    pub measurement: MeasurementSpec,
    #[serde(default = "default_grid_n")]
    pub grid_n: usize,
    #[serde(default = "default_discrimination_output")]
    pub output: String,
}

fn default_grid_n() -> usize {
    360
}

fn default_discrimination_output() -> String {
    "discrimination.json".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationReport {
    pub povm_success: f64,
    pub best_projective: f64,
    pub margin: f64,
}

pub fn discrimination(cfg: &DiscriminationConfig, base: &Path) -> CliResult<DiscriminationReport> {
    if cfg.states.is_empty() {
        return Err(CliError::Config("no states listed".into()));
    }
    let states = cfg.states.iter().map(|s| s.load(base)).collect::<CliResult<Vec<_>>>()?;
    let priors = cfg
        .priors
        .clone()
        .unwrap_or_else(|| vec![1.0 / states.len() as f64; states.len()]);
    let m = cfg.measurement.resolve(None, 0.0, base)?;
    let povm_success = discriminate(&states, &priors, &m)?.success_probability;
    let best_projective = best_projective_success(&states, &priors, cfg.grid_n)?;
    Ok(DiscriminationReport {
        povm_success,
        best_projective,
        margin: povm_success - best_projective,
    })
}

pub fn run_discrimination(opts: &RunOptions) -> CliResult<Vec<PathBuf>> {
    let cfg: DiscriminationConfig = read_json(&opts.config)?;
    let report = discrimination(&cfg, &base_dir(&opts.config))?;
    Ok(vec![write_output(&opts.out_dir, &cfg.output, &to_json(&report))?])
}

// ---------------------------------------------------------------------- mle

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MleConfig {
    pub model: ModelSpec,
    pub theta0: f64,
    /// Defaults to the measurement attaining the bound at `theta0`.
    #[serde(default)]
    pub measurement: Option<MeasurementSpec>,
    pub n: usize,
    pub reps: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Search interval; `theta0 ± π/2` when absent.
    #[serde(default)]
    pub range: Option<(f64, f64)>,
    #[serde(default = "default_estimates_output")]
    pub estimates_output: String,
    #[serde(default = "default_summary_output")]
    pub summary_output: String,
}

fn default_estimates_output() -> String {
    "mle_estimates.csv".into()
}

fn default_summary_output() -> String {
    "mle_summary.json".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MleSummary {
    pub n: usize,
    pub reps: usize,
    pub var_emp: f64,
    pub var_cr: f64,
    pub var_qcr: f64,
}

pub fn mle_experiment(cfg: &MleConfig, base: &Path, seed: Option<u64>) -> CliResult<(Vec<f64>, MleSummary)> {
    let seed = seed
        .or(cfg.seed)
        .ok_or_else(|| CliError::Config("a seed is required (config `seed` or --seed)".into()))?;
    if cfg.reps < 2 {
        return Err(CliError::Config(format!("reps must be at least 2, got {}", cfg.reps)));
    }
    let model = cfg.model.build()?;
    let spec = cfg
        .measurement
        .clone()
        .unwrap_or(MeasurementSpec::Attaining { at: Some(cfg.theta0) });
    let m = spec.resolve(Some(&model), cfg.theta0, base)?;
    let mc = MonteCarloConfig {
        n: cfg.n,
        reps: cfg.reps,
        seed,
        range: cfg.range.unwrap_or((cfg.theta0 - PI / 2.0, cfg.theta0 + PI / 2.0)),
    };
    let rep = monte_carlo_variance(&model, cfg.theta0, &m, &mc)?;
    let summary = MleSummary {
        n: cfg.n,
        reps: cfg.reps,
        var_emp: rep.var_emp,
        var_cr: rep.var_cr,
        var_qcr: rep.var_qcr,
    };
    Ok((rep.estimates, summary))
}

pub fn run_mle_experiment(opts: &RunOptions) -> CliResult<Vec<PathBuf>> {
    let cfg: MleConfig = read_json(&opts.config)?;
    let (estimates, summary) = mle_experiment(&cfg, &base_dir(&opts.config), opts.seed)?;
    let mut csv = String::from("rep,estimate\n");
    for (i, e) in estimates.iter().enumerate() {
        csv.push_str(&format!("{i},{}\n", fmt_f64(*e)));
    }
    Ok(vec![
        write_output(&opts.out_dir, &cfg.estimates_output, &csv)?,
        write_output(&opts.out_dir, &cfg.summary_output, &to_json(&summary))?,
    ])
}

// --------------------------------------------------------------------- choi

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSource {
    File { file: PathBuf },
    Random { random: RandomChannel },
    Inline(ChannelFile),
}

/// Random channel with `kraus` operators on `C^dim`, drawn from the run seed.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomChannel {
    pub dim: usize,
    pub kraus: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChoiConfig {
    pub channel: ChannelSource,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Random test states used in addition to the fixed probe panel.
    #[serde(default = "default_random_states")]
    pub random_states: usize,
    #[serde(default = "default_choi_output")]
    pub output: String,
    /// Also write the Choi matrix here when set.
    #[serde(default)]
    pub choi_output: Option<String>,
}

fn default_random_states() -> usize {
    10
}

fn default_choi_output() -> String {
    "choi_report.json".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiReport {
    pub dim: usize,
    pub kraus_in: usize,
    pub kraus_out: usize,
    /// Largest `‖σ₁(ρ) − σ₂(ρ)‖_max` over the probe panel and random states.
    pub roundtrip_residual: f64,
    /// `‖trace_1(choi) − 1/d‖_max`
    pub marginal_residual: f64,
}

pub fn choi_roundtrip(cfg: &ChoiConfig, base: &Path, seed: Option<u64>) -> CliResult<(ChoiReport, qinfer::ComplexMatrix)> {
    let seed = seed.or(cfg.seed).unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let channel = match &cfg.channel {
        ChannelSource::File { file } => read_json::<ChannelFile>(&base.join(file))?.to_channel()?,
        ChannelSource::Inline(f) => f.to_channel()?,
        ChannelSource::Random { random: spec } => {
            if spec.dim == 0 || spec.kraus == 0 {
                return Err(CliError::Config("random channel needs positive dim and kraus".into()));
            }
            Channel::new(random::kraus_operators(spec.dim, spec.kraus, &mut rng))?
        }
    };
    let choi = choi_state(&channel)?;
    let back = channel_from_choi(&choi)?;
    let mut residual = behavioral_distance(&channel, &back)?;
    for _ in 0..cfg.random_states {
        let rho = random::density_matrix(channel.dim(), &mut rng);
        let a = apply_channel(&channel, &rho)?;
        let b = apply_channel(&back, &rho)?;
        residual = residual.max(a.matrix().max_diff(b.matrix()));
    }
    let report = ChoiReport {
        dim: channel.dim(),
        kraus_in: channel.kraus().len(),
        kraus_out: back.kraus().len(),
        roundtrip_residual: residual,
        marginal_residual: choi.marginal_residual(),
    };
    Ok((report, choi.matrix().clone()))
}

pub fn run_choi_roundtrip(opts: &RunOptions) -> CliResult<Vec<PathBuf>> {
    let cfg: ChoiConfig = read_json(&opts.config)?;
    let (report, choi) = choi_roundtrip(&cfg, &base_dir(&opts.config), opts.seed)?;
    let mut written = vec![write_output(&opts.out_dir, &cfg.output, &to_json(&report))?];
    if let Some(name) = &cfg.choi_output {
        written.push(write_output(&opts.out_dir, name, &to_json(&matrix_to_json(&choi)))?);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g: Grid = serde_json::from_str(r#"{"start": 0, "stop": 1, "points": 5}"#).unwrap();
        assert_eq!(g.values().unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        let g: Grid = serde_json::from_str("[0.5, 2]").unwrap();
        assert_eq!(g.values().unwrap(), vec![0.5, 2.0]);
        assert!(Grid::List(vec![]).values().is_err());
        assert!(Grid::Linspace { start: 0.0, stop: 1.0, points: 0 }.values().is_err());
    }

    #[test]
    fn measurement_specs_parse() {
        let m: MeasurementSpec = serde_json::from_str(r#"{"type": "attaining"}"#).unwrap();
        assert!(m.is_pointwise());
        let m: MeasurementSpec = serde_json::from_str(r#"{"type": "projective", "direction": [1, 0, 0]}"#).unwrap();
        assert_eq!(m.resolve(None, 0.0, Path::new(".")).unwrap().len(), 2);
        let m: MeasurementSpec = serde_json::from_str(
            r#"{"type": "povm", "labels": [0, 1], "elements": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0,0],[0,0]],[[0,0],[1,0]]]]}"#,
        )
        .unwrap();
        assert_eq!(m.resolve(None, 0.0, Path::new(".")).unwrap().len(), 2);
        assert!(MeasurementSpec::Attaining { at: None }.resolve(None, 0.0, Path::new(".")).is_err());
    }

    #[test]
    fn sweep_rows_follow_grid_order() {
        let cfg: QfiSweepConfig = serde_json::from_str(
            r#"{"theta": [0.1, 0.2, 0.3], "eta": [0.5, 1.5], "measurement": {"type": "attaining"}}"#,
        )
        .unwrap();
        let rows = qfi_sweep(&cfg, Path::new(".")).unwrap();
        assert_eq!(rows.len(), 6);
        assert_eq!((rows[0].eta, rows[0].theta), (Some(0.5), 0.1));
        assert_eq!((rows[5].eta, rows[5].theta), (Some(1.5), 0.3));
        for r in &rows {
            assert!((r.quantum - r.eta.unwrap().sin().powi(2)).abs() < 1e-10);
            assert!(r.gap.abs() < 1e-8);
        }
        assert!(sweep_csv(&rows).starts_with("eta,theta,i,I,gap\n"));
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let cfg: MleConfig = serde_json::from_str(
            r#"{"model": {"family": "great_circle", "params": {}}, "theta0": 0.3, "n": 10, "reps": 1, "seed": 1}"#,
        )
        .unwrap();
        assert_eq!(mle_experiment(&cfg, Path::new("."), None).unwrap_err().exit_code(), 2);
        let cfg = MleConfig { reps: 3, seed: None, ..cfg };
        assert_eq!(mle_experiment(&cfg, Path::new("."), None).unwrap_err().exit_code(), 2);
        assert!(mle_experiment(&cfg, Path::new("."), Some(4)).is_ok());
        assert_eq!(CliError::from(qinfer::Error::ZeroInformation).exit_code(), 3);
    }
}
