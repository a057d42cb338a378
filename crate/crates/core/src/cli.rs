//! JSON-configured experiment runner behind the `nonmarkov` binary.
//!
//! Outputs are CSV (phase factors, leaked information, measures) or JSON
//! (check suites). Floats are written with Rust's shortest round-trip
//! formatting, so identical inputs give byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dephasing::discrete::{leaked_information, DEFAULT_BRANCH_BUDGET};
use crate::dephasing::{
    apply_dephasing_map, build_discrete_model, dephasing_map, phase_factor_series,
    system_partition, DephasingParams, EnvKind, EnvPart,
};
use crate::error::{Error, Result};
use crate::linalg::{trace, CMatrix, C64};
use crate::measures::{
    measure_distance_blp, measure_lfs, ops_state, optimal_pair_state, positive_increment_integral,
    uniform_grid, Distance, MeasureName, MeasureResult, Parties, StateTrajectory,
    DEFAULT_NOISE_TOL,
};
use crate::oracle::{identity_suite, special_function_suite, SuiteReport};
use crate::qstate::{random_pure_vector, DensityMatrix, SystemPartition};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "NONMARKOV_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    PhaseFactors,
    Cmi,
    Measures,
    Check,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteConfig {
    pub n_modes: usize,
    pub n_max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_start: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl GridConfig {
    /// Grid points `t_start + k·dt` computed as fractions of the span, so that
    /// the end point is hit exactly.
    pub fn times(&self) -> Result<Vec<f64>> {
        let span = self.t_end - self.t_start;
        if !(self.dt > 0.0) || !(span >= 0.0) || !span.is_finite() {
            return Err(Error::Config(format!("invalid grid {self:?}")));
        }
        let steps = (span / self.dt).round();
        if (steps * self.dt - span).abs() > 1e-9 * span.max(1.0) {
            return Err(Error::Config(format!(
                "dt = {} does not divide [{}, {}]",
                self.dt, self.t_start, self.t_end
            )));
        }
        Ok(uniform_grid(self.t_start, self.t_end, steps as usize))
    }
}

fn default_samples() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default)]
    pub dephasing: Option<DephasingParams>,
    /// Bath kinds to run; defaults to the kind inside `dephasing`.
    #[serde(default)]
    pub env_kinds: Option<Vec<EnvKind>>,
    #[serde(default)]
    pub discrete: Option<DiscreteConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    /// `ops_state`, `tsio:<ab>,<cd>` or `random:<seed>`.
    #[serde(default)]
    pub candidates: Vec<String>,
    pub output_path: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    fn dephasing(&self) -> Result<&DephasingParams> {
        let p = self
            .dephasing
            .as_ref()
            .ok_or_else(|| Error::Config(format!("mode {:?} needs `dephasing`", self.mode)))?;
        p.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(p)
    }

    fn kinds(&self) -> Result<Vec<EnvKind>> {
        match &self.env_kinds {
            Some(k) if k.is_empty() => Err(Error::Config("`env_kinds` is empty".into())),
            Some(k) => Ok(k.clone()),
            None => Ok(vec![self.dephasing()?.env_kind]),
        }
    }

    fn times(&self) -> Result<Vec<f64>> {
        self.grid
            .as_ref()
            .ok_or_else(|| Error::Config(format!("mode {:?} needs `grid`", self.mode)))?
            .times()
    }

    fn discrete(&self) -> Result<DiscreteConfig> {
        self.discrete
            .ok_or_else(|| Error::Config(format!("mode {:?} needs `discrete`", self.mode)))
    }

    fn candidate_specs(&self) -> Result<Vec<Candidate>> {
        if self.candidates.is_empty() {
            return Ok(vec![Candidate::Ops]);
        }
        self.candidates.iter().map(|s| Candidate::parse(s)).collect()
    }
}

/// Parsed candidate initial state.
#[derive(Debug, Clone, PartialEq)]
pub enum Candidate {
    Ops,
    /// Two computational basis states of `S1 S2`.
    Pair(usize, usize),
    Random(u64),
}

impl Candidate {
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unrecognized candidate `{spec}`"));
        if spec == "ops_state" {
            return Ok(Candidate::Ops);
        }
        if let Some(rest) = spec.strip_prefix("tsio:") {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            let idx = |s: &str| -> Result<usize> {
                if s.len() != 2 || !s.chars().all(|c| c == '0' || c == '1') {
                    return Err(bad());
                }
                usize::from_str_radix(s, 2).map_err(|_| bad())
            };
            return Ok(Candidate::Pair(idx(a.trim())?, idx(b.trim())?));
        }
        if let Some(rest) = spec.strip_prefix("random:") {
            return rest.trim().parse().map(Candidate::Random).map_err(|_| bad());
        }
        Err(bad())
    }

    /// Initial state on `[A, S1, S2]`.
    pub fn state(&self) -> Result<DensityMatrix> {
        match *self {
            Candidate::Ops => Ok(ops_state()),
            Candidate::Pair(a, b) => {
                let (r1, r2) = (basis_s(a)?, basis_s(b)?);
                optimal_pair_state(&r1, &r2, "A")?.reorder(&["A", "S1", "S2"])
            }
            Candidate::Random(seed) => DensityMatrix::from_pure(
                &random_pure_vector(8, seed),
                SystemPartition::qubits(&["A", "S1", "S2"])?,
            ),
        }
    }

    /// State pair on `[S1, S2]` for the distance measures.
    pub fn pair(&self) -> Result<(DensityMatrix, DensityMatrix)> {
        if let Candidate::Pair(a, b) = *self {
            return Ok((basis_s(a)?, basis_s(b)?));
        }
        // system states conditioned on the ancilla flag; A is the leading factor
        let rho = self.state()?;
        let cond = |k: usize| -> Result<DensityMatrix> {
            let block: CMatrix = rho.data().view((4 * k, 4 * k), (4, 4)).into_owned();
            let w = trace(&block).re;
            if w < 1e-12 {
                return Err(Error::Config("candidate has an empty flag branch".into()));
            }
            DensityMatrix::new(block / C64::new(w, 0.0), system_partition())
        };
        Ok((cond(0)?, cond(1)?))
    }
}

fn basis_s(k: usize) -> Result<DensityMatrix> {
    DensityMatrix::basis(system_partition(), k)
}

/// Process exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Quadrature { .. } | Error::Truncation { .. } => EXIT_NUMERICAL,
        _ => EXIT_CONFIG,
    }
}

/// Caps rayon's global pool from [`THREADS_ENV`] when set.
pub fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // a pool may already exist when called twice; keep it
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("output path {} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub contents: String,
    /// `false` only for check suites with failures.
    pub passed: bool,
}

pub fn phase_factor_csv(cfg: &ExperimentConfig) -> Result<String> {
    let base = cfg.dephasing()?;
    let times = cfg.times()?;
    let mut out = String::from("t,|k1|,|k2|,|k1t|,|k2t|,|k12|,|lam12|,env_kind\n");
    for kind in cfg.kinds()? {
        let series = phase_factor_series(&base.with_kind(kind), &times)?;
        for (t, pf) in times.iter().zip(series) {
            write!(out, "{t:?}").expect("string write");
            for m in pf.magnitudes() {
                write!(out, ",{m:?}").expect("string write");
            }
            writeln!(out, ",{kind}").expect("string write");
        }
    }
    Ok(out)
}

pub fn cmi_csv(cfg: &ExperimentConfig) -> Result<String> {
    let base = cfg.dephasing()?;
    let times = cfg.times()?;
    let d = cfg.discrete()?;
    let initial = cfg.candidate_specs()?[0].state()?;
    let mut out = String::from("t,I_A_E1_S,I_A_E2_S,I_A_E1E2_S,env_kind\n");
    for kind in cfg.kinds()? {
        let model = build_discrete_model(&base.with_kind(kind), d.n_modes, d.n_max)?;
        let li = leaked_information(&model, &initial, &times, DEFAULT_BRANCH_BUDGET)?;
        for (t, e) in times.iter().zip(&li.entropies) {
            writeln!(
                out,
                "{t:?},{:?},{:?},{:?},{kind}",
                e.cmi(EnvPart::E1),
                e.cmi(EnvPart::E2),
                e.cmi(EnvPart::E1E2)
            )
            .expect("string write");
        }
    }
    Ok(out)
}

/// BLP, tBLP, LFS and (with a discrete model) N1 for one bath kind.
pub fn dephasing_measures(
    params: &DephasingParams,
    candidates: &[Candidate],
    times: &[f64],
    discrete: Option<DiscreteConfig>,
) -> Result<Vec<MeasureResult>> {
    let maps = times
        .iter()
        .map(|&t| dephasing_map(params, t))
        .collect::<Result<Vec<_>>>()?;
    let evolve = |rho: &DensityMatrix| -> Result<StateTrajectory> {
        let states = maps
            .iter()
            .map(|f| apply_dephasing_map(rho, f))
            .collect::<Result<Vec<_>>>()?;
        StateTrajectory::new(times.to_vec(), states)
    };
    let states = candidates.iter().map(Candidate::state).collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    for c in candidates {
        let (a, b) = c.pair()?;
        pairs.push((evolve(&a)?, evolve(&b)?));
    }
    let trajs = states.iter().map(&evolve).collect::<Result<Vec<_>>>()?;
    let parties = Parties::new(&["A"], &["S1", "S2"]);
    let mut out = vec![
        measure_distance_blp(&pairs, Distance::Trace)?,
        measure_distance_blp(&pairs, Distance::Telescopic)?,
        measure_lfs(&trajs, &parties)?,
    ];
    if let Some(d) = discrete {
        let model = build_discrete_model(params, d.n_modes, d.n_max)?;
        let mut best: Option<MeasureResult> = None;
        for (k, s) in states.iter().enumerate() {
            let li = leaked_information(&model, s, times, DEFAULT_BRANCH_BUDGET)?;
            let (value, increments) =
                positive_increment_integral(&li.cmi(EnvPart::E1E2)?.negated(), DEFAULT_NOISE_TOL)?;
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(MeasureResult {
                    measure_name: MeasureName::N1,
                    value,
                    best_candidate_index: k,
                    increments,
                });
            }
        }
        out.extend(best);
    }
    Ok(out)
}

pub fn measures_csv(cfg: &ExperimentConfig) -> Result<String> {
    let base = cfg.dephasing()?;
    let times = cfg.times()?;
    let candidates = cfg.candidate_specs()?;
    let mut out = String::from("measure,value,best_candidate,increment_count\n");
    for kind in cfg.kinds()? {
        for m in dephasing_measures(&base.with_kind(kind), &candidates, &times, cfg.discrete)? {
            let count = m.increments.values().iter().filter(|v| **v > 0.0).count();
            writeln!(
                out,
                "{}/{kind},{:?},{},{count}",
                m.measure_name, m.value, m.best_candidate_index
            )
            .expect("string write");
        }
    }
    Ok(out)
}

/// Identity and special-function suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutput {
    pub identity: SuiteReport,
    pub special_functions: SuiteReport,
}

impl CheckOutput {
    pub fn passed(&self) -> bool {
        self.identity.passed() && self.special_functions.passed()
    }
}

pub fn run_checks(seed: u64, samples: usize) -> Result<CheckOutput> {
    Ok(CheckOutput {
        identity: identity_suite(seed, samples)?,
        special_functions: special_function_suite(seed)?,
    })
}

fn check_outcome(seed: u64, samples: usize) -> Result<Outcome> {
    let out = run_checks(seed, samples)?;
    let mut contents = serde_json::to_string_pretty(&out)?;
    contents.push('\n');
    Ok(Outcome {
        contents,
        passed: out.passed(),
    })
}

/// Executes a configuration without touching the file system.
pub fn execute(cfg: &ExperimentConfig) -> Result<Outcome> {
    let ok = |contents| Outcome { contents, passed: true };
    match cfg.mode {
        Mode::PhaseFactors => phase_factor_csv(cfg).map(ok),
        Mode::Cmi => cmi_csv(cfg).map(ok),
        Mode::Measures => measures_csv(cfg).map(ok),
        Mode::Check => check_outcome(cfg.seed, cfg.samples),
    }
}

fn finish(result: Result<Outcome>, output: Option<&Path>) -> i32 {
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    let written = match output {
        Some(p) => write_atomic(p, &outcome.contents),
        None => {
            print!("{}", outcome.contents);
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    if outcome.passed {
        EXIT_OK
    } else {
        eprintln!("check suite reported failures");
        EXIT_CHECK_FAILED
    }
}

/// `nonmarkov run <config.json>`.
pub fn run(config_path: &Path) -> i32 {
    init_threads();
    let cfg = match ExperimentConfig::from_path(config_path) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {}: {e}", config_path.display());
            return EXIT_CONFIG;
        }
    };
    finish(execute(&cfg), Some(&cfg.output_path))
}

/// `nonmarkov check --seed N --samples M`.
pub fn check(seed: u64, samples: usize, output: Option<&Path>) -> i32 {
    init_threads();
    finish(check_outcome(seed, samples), output)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(json: &str) -> ExperimentConfig {
        serde_json::from_str(json).unwrap()
    }

    const PHASE: &str = r#"{
        "mode": "phase_factors",
        "dephasing": {"alpha1": 1, "alpha2": 1, "omega_c": 0.01, "r": 3,
                      "t1s": 0, "t1f": 2.5, "t2s": 2.5, "t2f": 5, "env_kind": "entangled"},
        "env_kinds": ["entangled", "classical"],
        "grid": {"t_start": 0, "t_end": 5, "dt": 0.5},
        "output_path": "unused.csv"
    }"#;

    #[test]
    fn phase_factor_rows_start_at_one() {
        let out = execute(&config(PHASE)).unwrap().contents;
        let mut lines = out.lines();
        assert_eq!(lines.next().unwrap(), "t,|k1|,|k2|,|k1t|,|k2t|,|k12|,|lam12|,env_kind");
        assert_eq!(lines.next().unwrap(), "0.0,1.0,1.0,1.0,1.0,1.0,1.0,entangled");
        assert_eq!(out.lines().count(), 1 + 2 * 11);
        assert!(out.lines().any(|l| l == "0.0,1.0,1.0,1.0,1.0,1.0,1.0,classical"));
    }

    #[test]
    fn grid_must_divide_span() {
        let g = GridConfig { t_start: 0.0, t_end: 1.0, dt: 0.3 };
        assert!(g.times().is_err());
        let g = GridConfig { t_start: 0.0, t_end: 5.0, dt: 0.01 };
        let t = g.times().unwrap();
        assert_eq!((t.len(), t[250], t[500]), (501, 2.5, 5.0));
    }

    #[test]
    fn missing_sections_are_config_errors() {
        let cfg = config(r#"{"mode": "cmi", "output_path": "x.csv"}"#);
        let err = execute(&cfg).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_CONFIG);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"mode": "nope", "output_path": "x"}"#).is_err());
    }

    #[test]
    fn truncation_maps_to_numerical_exit() {
        let mut cfg = config(PHASE);
        cfg.mode = Mode::Cmi;
        cfg.discrete = Some(DiscreteConfig { n_modes: 1, n_max: 3 });
        let err = execute(&cfg).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_NUMERICAL);
    }

    #[test]
    fn candidate_specs() {
        assert_eq!(Candidate::parse("ops_state").unwrap(), Candidate::Ops);
        assert_eq!(Candidate::parse("tsio:01,10").unwrap(), Candidate::Pair(1, 2));
        assert_eq!(Candidate::parse("random:7").unwrap(), Candidate::Random(7));
        assert!(Candidate::parse("tsio:2,10").is_err());
        assert!(Candidate::parse("ghz").is_err());
        let (a, b) = Candidate::Ops.pair().unwrap();
        assert!((a.data()[(1, 1)].re - 1.0).abs() < 1e-12);
        assert!((b.data()[(2, 2)].re - 1.0).abs() < 1e-12);
        let p = Candidate::Pair(0, 3).state().unwrap();
        assert_eq!(p.partition().labels().collect::<Vec<_>>(), ["A", "S1", "S2"]);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        write_atomic(&path, "a\n").unwrap();
        write_atomic(&path, "b\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "b\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
