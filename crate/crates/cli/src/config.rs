//! Experiment configuration.
//!
//! The file format is line oriented:
//!
//! ```text
//! # comment
//! scenario = two_qubit
//! trials = 1000
//!
//! [model]
//! omega = 1.0
//! g = 0.1
//! ```
//!
//! Keys before the first `[section]` header belong to the top level. Values
//! are single tokens or comma-separated lists; a `#` starts a comment anywhere
//! on a line. Every key must be known to the chosen scenario, and each may
//! appear once.

use std::collections::BTreeMap;
use std::path::PathBuf;

use sha2::{Digest, Sha256};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    TwoQubit,
    SpinBath,
    Oscillator,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::TwoQubit => "two_qubit",
            ScenarioKind::SpinBath => "spin_bath",
            ScenarioKind::Oscillator => "oscillator",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// |0⟩ on the protected qubit.
    Eigenstate,
    /// (|0⟩ + |1⟩)/√2 on the protected qubit.
    Superposition,
}

/// Per-scenario physical parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    TwoQubit {
        omega: f64,
        g: f64,
        initial: InitialState,
    },
    SpinBath {
        nuclei: usize,
        /// ω_k for the central spin and each nucleus, K+1 entries.
        omegas: Vec<f64>,
        /// A_k for each nucleus, K entries.
        couplings: Vec<f64>,
        initial: InitialState,
    },
    Oscillator {
        /// Fock truncation per mode.
        dim: usize,
        omega_a: f64,
        omega_b: f64,
        g: f64,
        /// Pulse phase φ of e^{iφ a†a}.
        phi: f64,
        /// Coherent amplitude of mode A (re, im).
        alpha: (f64, f64),
    },
}

/// The error operator B.
#[derive(Debug, Clone, PartialEq)]
pub enum ErrorSpec {
    /// B = B⁽¹⁾ ⊗ B⁽²⁾ with B⁽ⁱ⁾ = c0·I + cx·σx + cy·σy + cz·σz.
    Product { alpha: [f64; 4], beta: [f64; 4] },
    /// B = ⊗_k σ_{axis_k}, one axis per site.
    PauliString(String),
    /// B = (number·a†a + displacement·(a† + a)) ⊗ I.
    Mode { number: f64, displacement: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    /// Pulse counts for sweep-pulses and bounds.
    pub n: Vec<usize>,
    /// γt values for sweep-pulses and bounds.
    pub gamma_t: Vec<f64>,
    /// Number of time intervals sampled by a trajectories run.
    pub points: usize,
    /// Initial split steps per unit γt.
    pub steps_per_unit: usize,
    /// Step halving stops once the fidelities change by less than this.
    pub refine_tol: f64,
    pub max_halvings: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioKind,
    pub trials: usize,
    pub master_seed: u64,
    pub output: Option<PathBuf>,
    pub model: ModelParams,
    /// Total evolution time for finite-pulse runs.
    pub t: Option<f64>,
    /// Noise strength γ for trajectories runs.
    pub gamma: f64,
    pub error: ErrorSpec,
    /// Pulse tokens of one cycle in application order.
    pub pulses: Vec<String>,
    pub sweep: SweepSpec,
    /// SHA-256 of the raw configuration text.
    pub source_hash: String,
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
    used: bool,
}

/// Raw `section.key = value` table.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<String, Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::syntax(line_no, "unterminated section header"))?
                    .trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    return Err(ConfigError::syntax(line_no, format!("bad section name `{name}`")));
                }
                section = name.to_string();
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| ConfigError::syntax(line_no, "expected `key = value`"))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::syntax(line_no, "empty key"));
            }
            let full = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
            let entry = Entry { value: value.trim().to_string(), line: line_no, used: false };
            if let Some(prev) = entries.insert(full.clone(), entry) {
                return Err(ConfigError::field(
                    &full,
                    Some(line_no),
                    format!("duplicate key (first set on line {})", prev.line),
                ));
            }
        }
        Ok(Self { entries })
    }

    fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.get_mut(key).map(|e| {
            e.used = true;
            (e.value.clone(), e.line)
        })
    }

    fn string(&mut self, key: &str) -> Result<Option<String>, ConfigError> {
        Ok(self.take(key).map(|(v, _)| v))
    }

    fn required_string(&mut self, key: &str) -> Result<String, ConfigError> {
        self.string(key)?.ok_or_else(|| ConfigError::field(key, None, "required key is missing"))
    }

    fn parsed<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse::<T>()
                .map(Some)
                .map_err(|_| ConfigError::field(key, Some(line), format!("`{v}` is not {what}"))),
        }
    }

    fn real(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        let line = self.entries.get(key).map(|e| e.line);
        match self.parsed::<f64>(key, "a real number")? {
            Some(x) if !x.is_finite() => Err(ConfigError::field(key, line, "value must be finite")),
            other => Ok(other),
        }
    }

    fn required_real(&mut self, key: &str) -> Result<f64, ConfigError> {
        self.real(key)?.ok_or_else(|| ConfigError::field(key, None, "required key is missing"))
    }

    fn list<T: std::str::FromStr>(&mut self, key: &str, what: &str) -> Result<Option<Vec<T>>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some((v, line)) => v
                .split(',')
                .map(|item| {
                    let item = item.trim();
                    item.parse::<T>()
                        .map_err(|_| ConfigError::field(key, Some(line), format!("`{item}` is not {what}")))
                })
                .collect::<Result<Vec<T>, _>>()
                .map(Some),
        }
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.entries.get(key).map(|e| e.line)
    }

    fn unused(&self) -> Option<(&str, usize)> {
        self.entries.iter().find(|(_, e)| !e.used).map(|(k, e)| (k.as_str(), e.line))
    }
}

fn nonnegative(key: &str, line: Option<usize>, x: f64) -> Result<f64, ConfigError> {
    if x < 0.0 {
        Err(ConfigError::field(key, line, format!("{x} must be ≥ 0")))
    } else {
        Ok(x)
    }
}

fn coefficients(raw: &mut RawConfig, key: &str) -> Result<[f64; 4], ConfigError> {
    let line = raw.line_of(key);
    let v = raw
        .list::<f64>(key, "a real number")?
        .ok_or_else(|| ConfigError::field(key, None, "required key is missing"))?;
    <[f64; 4]>::try_from(v.as_slice())
        .map_err(|_| ConfigError::field(key, line, format!("expected 4 coefficients (I, x, y, z), found {}", v.len())))
}

fn initial_state(raw: &mut RawConfig) -> Result<InitialState, ConfigError> {
    let line = raw.line_of("model.initial");
    match raw.string("model.initial")?.as_deref() {
        None | Some("superposition") => Ok(InitialState::Superposition),
        Some("eigenstate") => Ok(InitialState::Eigenstate),
        Some(other) => {
            Err(ConfigError::field("model.initial", line, format!("`{other}` is not one of eigenstate, superposition")))
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::parse(text)?;
        let source_hash = hex::encode(Sha256::digest(text.as_bytes()));

        let scenario_line = raw.line_of("scenario");
        let scenario = match raw.required_string("scenario")?.as_str() {
            "two_qubit" => ScenarioKind::TwoQubit,
            "spin_bath" => ScenarioKind::SpinBath,
            "oscillator" => ScenarioKind::Oscillator,
            other => {
                return Err(ConfigError::field(
                    "scenario",
                    scenario_line,
                    format!("`{other}` is not one of two_qubit, spin_bath, oscillator"),
                ))
            }
        };
        let trials = raw.parsed::<usize>("trials", "a positive integer")?.unwrap_or(1000);
        if trials == 0 {
            return Err(ConfigError::field("trials", raw.line_of("trials"), "trials must be ≥ 1"));
        }
        let master_seed = raw.parsed::<u64>("master_seed", "a 64-bit unsigned integer")?.unwrap_or(0);
        let output = raw.string("output")?.map(PathBuf::from);

        let t = match raw.real("model.t")? {
            Some(t) => Some(nonnegative("model.t", raw.line_of("model.t"), t)?),
            None => None,
        };
        let gamma = match raw.real("model.gamma")? {
            Some(g) => nonnegative("model.gamma", raw.line_of("model.gamma"), g)?,
            None => 1.0,
        };

        let (model, error) = match scenario {
            ScenarioKind::TwoQubit => {
                let omega = raw.required_real("model.omega")?;
                let g = raw.required_real("model.g")?;
                let initial = initial_state(&mut raw)?;
                let alpha = coefficients(&mut raw, "error.alpha")?;
                let beta = coefficients(&mut raw, "error.beta")?;
                (ModelParams::TwoQubit { omega, g, initial }, ErrorSpec::Product { alpha, beta })
            }
            ScenarioKind::SpinBath => {
                let k_line = raw.line_of("model.nuclei");
                let nuclei = raw
                    .parsed::<usize>("model.nuclei", "a positive integer")?
                    .ok_or_else(|| ConfigError::field("model.nuclei", None, "required key is missing"))?;
                if nuclei == 0 || nuclei + 1 > ddsim::operators::MAX_SPIN_BATH_SITES {
                    return Err(ConfigError::field(
                        "model.nuclei",
                        k_line,
                        format!("{nuclei} nuclei outside 1..={}", ddsim::operators::MAX_SPIN_BATH_SITES - 1),
                    ));
                }
                let omega = raw.required_real("model.omega")?;
                let omegas_line = raw.line_of("model.omega_k");
                let omegas = match raw.list::<f64>("model.omega_k", "a real number")? {
                    None => vec![omega; nuclei + 1],
                    Some(v) if v.len() == nuclei + 1 => v,
                    Some(v) => {
                        return Err(ConfigError::field(
                            "model.omega_k",
                            omegas_line,
                            format!("expected {} values (central spin first), found {}", nuclei + 1, v.len()),
                        ))
                    }
                };
                let couplings_line = raw.line_of("model.couplings");
                let couplings = match raw.string("model.couplings")?.as_deref() {
                    None | Some("hyperfine") => ddsim::operators::hyperfine_profile(nuclei, omega),
                    Some(list) => {
                        let v: Result<Vec<f64>, _> = list.split(',').map(|s| s.trim().parse::<f64>()).collect();
                        match v {
                            Ok(v) if v.len() == nuclei => v,
                            _ => {
                                return Err(ConfigError::field(
                                    "model.couplings",
                                    couplings_line,
                                    format!("expected `hyperfine` or {nuclei} real values"),
                                ))
                            }
                        }
                    }
                };
                let initial = initial_state(&mut raw)?;
                let axes_line = raw.line_of("error.axes");
                let axes = raw
                    .list::<String>("error.axes", "an axis")?
                    .ok_or_else(|| ConfigError::field("error.axes", None, "required key is missing"))?;
                if axes.len() != nuclei + 1 || axes.iter().any(|a| ddsim::operators::Axis::parse(a).is_none()) {
                    return Err(ConfigError::field(
                        "error.axes",
                        axes_line,
                        format!("expected {} axes from I, X, Y, Z", nuclei + 1),
                    ));
                }
                let string: String = axes.iter().map(|a| a.trim().to_ascii_uppercase()).collect();
                (ModelParams::SpinBath { nuclei, omegas, couplings, initial }, ErrorSpec::PauliString(string))
            }
            ScenarioKind::Oscillator => {
                let dim_line = raw.line_of("model.dim");
                let dim = raw
                    .parsed::<usize>("model.dim", "a positive integer")?
                    .ok_or_else(|| ConfigError::field("model.dim", None, "required key is missing"))?;
                if !(2..=16).contains(&dim) {
                    return Err(ConfigError::field(
                        "model.dim",
                        dim_line,
                        format!("Fock truncation {dim} outside 2..=16"),
                    ));
                }
                let omega_a = raw.required_real("model.omega_a")?;
                let omega_b = raw.required_real("model.omega_b")?;
                let g = raw.required_real("model.g")?;
                let phi_line = raw.line_of("model.phi");
                let phi = raw.real("model.phi")?.unwrap_or(std::f64::consts::PI);
                if !(phi > 0.0 && phi <= std::f64::consts::PI) {
                    return Err(ConfigError::field("model.phi", phi_line, format!("{phi} outside (0, π]")));
                }
                let alpha_line = raw.line_of("model.alpha");
                let alpha = match raw.list::<f64>("model.alpha", "a real number")?.as_deref() {
                    None => (1.0, 0.0),
                    Some([re]) => (*re, 0.0),
                    Some([re, im]) => (*re, *im),
                    Some(_) => return Err(ConfigError::field("model.alpha", alpha_line, "expected `re` or `re, im`")),
                };
                let number = raw.real("error.number")?.unwrap_or(1.0);
                let displacement = raw.real("error.displacement")?.unwrap_or(1.0);
                (
                    ModelParams::Oscillator { dim, omega_a, omega_b, g, phi, alpha },
                    ErrorSpec::Mode { number, displacement },
                )
            }
        };

        let pulses = raw
            .list::<String>("scheme.pulses", "a pulse token")?
            .ok_or_else(|| ConfigError::field("scheme.pulses", None, "required key is missing"))?;

        let n = raw.list::<usize>("sweep.n", "a positive integer")?.unwrap_or_default();
        if n.contains(&0) {
            return Err(ConfigError::field("sweep.n", raw.line_of("sweep.n"), "pulse counts must be ≥ 1"));
        }
        let gamma_t = raw.list::<f64>("sweep.gamma_t", "a real number")?.unwrap_or_default();
        if let Some(bad) = gamma_t.iter().find(|x| !(**x >= 0.0) || !x.is_finite()) {
            return Err(ConfigError::field(
                "sweep.gamma_t",
                raw.line_of("sweep.gamma_t"),
                format!("{bad} must be finite and ≥ 0"),
            ));
        }
        let points = raw.parsed::<usize>("sweep.points", "a positive integer")?.unwrap_or(20);
        let steps_per_unit = raw.parsed::<usize>("sweep.steps_per_unit", "a positive integer")?.unwrap_or(1000);
        let refine_tol = raw.real("sweep.refine_tol")?.unwrap_or(1e-4);
        let max_halvings = raw.parsed::<usize>("sweep.max_halvings", "a non-negative integer")?.unwrap_or(6);
        if points == 0 || steps_per_unit == 0 {
            return Err(ConfigError::field("sweep", None, "points and steps_per_unit must be ≥ 1"));
        }

        if let Some((key, line)) = raw.unused() {
            return Err(ConfigError::field(key, Some(line), format!("unknown key for scenario {}", scenario.name())));
        }

        Ok(Self {
            scenario,
            trials,
            master_seed,
            output,
            model,
            t,
            gamma,
            error,
            pulses,
            sweep: SweepSpec { n, gamma_t, points, steps_per_unit, refine_tol, max_halvings },
            source_hash,
        })
    }

    pub fn require_t(&self) -> Result<f64, ConfigError> {
        self.t.ok_or_else(|| ConfigError::field("model.t", None, "required for this command"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_QUBIT: &str = "\
scenario = two_qubit   # Fig. 3 setup
trials = 10
master_seed = 7
[model]
omega = 1
g = 0.1
t = 10
initial = eigenstate
[error]
alpha = 0, 0, 1, 0
beta = 0, 0, 1, 0
[scheme]
pulses = ZI
[sweep]
n = 2, 4, 8
gamma_t = 0, 50
";

    #[test]
    fn parses_two_qubit() {
        let c = ExperimentConfig::parse(TWO_QUBIT).unwrap();
        assert_eq!(c.scenario, ScenarioKind::TwoQubit);
        assert_eq!(c.trials, 10);
        assert_eq!(c.master_seed, 7);
        assert_eq!(c.t, Some(10.0));
        assert_eq!(c.pulses, vec!["ZI".to_string()]);
        assert_eq!(c.sweep.n, vec![2, 4, 8]);
        assert_eq!(c.sweep.gamma_t, vec![0.0, 50.0]);
        assert_eq!(c.model, ModelParams::TwoQubit { omega: 1.0, g: 0.1, initial: InitialState::Eigenstate });
        assert_eq!(c.source_hash.len(), 64);
    }

    #[test]
    fn reports_field_level_errors() {
        let missing = TWO_QUBIT.replace("g = 0.1\n", "");
        let e = ExperimentConfig::parse(&missing).unwrap_err();
        assert_eq!(e.field_name(), Some("model.g"));

        let bad = TWO_QUBIT.replace("omega = 1", "omega = fast");
        let e = ExperimentConfig::parse(&bad).unwrap_err();
        assert_eq!(e.field_name(), Some("model.omega"));
        assert!(e.to_string().contains("line 5"), "{e}");

        let unknown = format!("{TWO_QUBIT}colour = blue\n");
        assert_eq!(ExperimentConfig::parse(&unknown).unwrap_err().field_name(), Some("sweep.colour"));

        let dup = format!("{TWO_QUBIT}[model]\nomega = 2\n");
        assert_eq!(ExperimentConfig::parse(&dup).unwrap_err().field_name(), Some("model.omega"));

        let short = TWO_QUBIT.replace("alpha = 0, 0, 1, 0", "alpha = 0, 1");
        assert_eq!(ExperimentConfig::parse(&short).unwrap_err().field_name(), Some("error.alpha"));

        assert!(ExperimentConfig::parse("scenario = three_qubit\n").is_err());
        assert!(ExperimentConfig::parse("just words\n").is_err());
    }

    #[test]
    fn spin_bath_defaults() {
        let text = "\
scenario = spin_bath
[model]
nuclei = 5
omega = 1
t = 2
[error]
axes = x, x, x, x, x, x
[scheme]
pulses = XIIIII, ZIIIII, XIIIII, ZIIIII
";
        let c = ExperimentConfig::parse(text).unwrap();
        match &c.model {
            ModelParams::SpinBath { omegas, couplings, .. } => {
                assert_eq!(omegas.len(), 6);
                assert_eq!(couplings.len(), 5);
                assert!((couplings[0] - (-(0.4_f64).cbrt()).exp()).abs() < 1e-15);
            }
            other => panic!("unexpected model {other:?}"),
        }
        assert_eq!(c.error, ErrorSpec::PauliString("XXXXXX".into()));
    }
}
