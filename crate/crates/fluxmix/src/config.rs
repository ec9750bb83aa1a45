//! Run configuration: a single JSON document with circuit, basis, rate,
//! sweep and output sections. Omitted sections and fields fall back to the
//! reference parameters; every applied default is reported so runs are
//! self-describing. Unknown keys are rejected with their location.

use serde::{Deserialize, Serialize};

use crate::circuit::{BasisSpec, CircuitParams};
use crate::error::{Error, Result};
use crate::response::DecoherenceRates;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl Default for OutputFormat {
    fn default() -> Self {
        OutputFormat::Csv
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSection {
    pub f_min: f64,
    pub f_max: f64,
    pub steps: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        // Matches the visual range of the bias-flux figures.
        Self { f_min: 0.47, f_max: 0.53, steps: 601 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    pub format: OutputFormat,
    pub dir: String,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { format: OutputFormat::Csv, dir: ".".to_string() }
    }
}

/// Fully materialized run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub circuit: CircuitParams,
    pub basis: BasisSpec,
    pub rates: DecoherenceRates,
    pub sweep: SweepSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            circuit: CircuitParams::reference(),
            basis: BasisSpec::default_truncation(),
            rates: DecoherenceRates::reference(),
            sweep: SweepSection::default(),
            output: OutputSection::default(),
        }
    }
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

// Raw mirror with every leaf optional, so defaulting can be reported
// field by field.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    circuit: Option<RawCircuit>,
    basis: Option<RawBasis>,
    rates: Option<RawRates>,
    sweep: Option<RawSweep>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCircuit {
    ej_over_h: Option<f64>,
    alpha: Option<f64>,
    ej_over_ec: Option<f64>,
    f: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBasis {
    n_max: Option<i32>,
    m_max: Option<i32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRates {
    gamma11: Option<f64>,
    gamma22: Option<f64>,
    gamma33: Option<f64>,
    gamma12: Option<f64>,
    gamma13: Option<f64>,
    gamma23: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    f_min: Option<f64>,
    f_max: Option<f64>,
    steps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    format: Option<OutputFormat>,
    dir: Option<String>,
}

/// Parse result: the materialized config, the list of applied defaults
/// (one `section.field = value` entry each) and soft range warnings.
#[derive(Debug, Clone)]
pub struct ParsedConfig {
    pub config: RunConfig,
    pub applied_defaults: Vec<String>,
    pub warnings: Vec<String>,
}

/// Parse a JSON config document, applying reference-parameter defaults for
/// anything omitted. Syntax errors, unknown keys and invariant violations
/// report the offending key path.
pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;

    let mut defaults = Vec::new();
    let base = RunConfig::default();

    macro_rules! field {
        ($raw:expr, $name:literal, $field:ident, $default:expr) => {{
            match $raw.as_ref().and_then(|s| s.$field) {
                Some(v) => v,
                None => {
                    defaults.push(format!(concat!($name, " = {}"), $default));
                    $default
                }
            }
        }};
    }

    let circuit = CircuitParams {
        ej_over_h: field!(raw.circuit, "circuit.ej_over_h", ej_over_h, base.circuit.ej_over_h),
        alpha: field!(raw.circuit, "circuit.alpha", alpha, base.circuit.alpha),
        ej_over_ec: field!(raw.circuit, "circuit.ej_over_ec", ej_over_ec, base.circuit.ej_over_ec),
        f: field!(raw.circuit, "circuit.f", f, base.circuit.f),
    };
    let basis = BasisSpec {
        n_max: field!(raw.basis, "basis.n_max", n_max, base.basis.n_max),
        m_max: field!(raw.basis, "basis.m_max", m_max, base.basis.m_max),
    };
    let rates = DecoherenceRates {
        gamma11: field!(raw.rates, "rates.gamma11", gamma11, base.rates.gamma11),
        gamma22: field!(raw.rates, "rates.gamma22", gamma22, base.rates.gamma22),
        gamma33: field!(raw.rates, "rates.gamma33", gamma33, base.rates.gamma33),
        gamma12: field!(raw.rates, "rates.gamma12", gamma12, base.rates.gamma12),
        gamma13: field!(raw.rates, "rates.gamma13", gamma13, base.rates.gamma13),
        gamma23: field!(raw.rates, "rates.gamma23", gamma23, base.rates.gamma23),
    };
    let sweep = SweepSection {
        f_min: field!(raw.sweep, "sweep.f_min", f_min, base.sweep.f_min),
        f_max: field!(raw.sweep, "sweep.f_max", f_max, base.sweep.f_max),
        steps: field!(raw.sweep, "sweep.steps", steps, base.sweep.steps),
    };
    let output = OutputSection {
        format: match raw.output.as_ref().and_then(|o| o.format) {
            Some(v) => v,
            None => {
                defaults.push("output.format = csv".to_string());
                base.output.format
            }
        },
        dir: match raw.output.as_ref().and_then(|o| o.dir.clone()) {
            Some(v) => v,
            None => {
                defaults.push(format!("output.dir = {}", base.output.dir));
                base.output.dir.clone()
            }
        },
    };

    circuit.validate().map_err(|e| Error::Config {
        path: "circuit".to_string(),
        message: e.to_string(),
    })?;
    basis.validate().map_err(|e| Error::Config {
        path: "basis".to_string(),
        message: e.to_string(),
    })?;
    rates.validate().map_err(|e| Error::Config {
        path: "rates".to_string(),
        message: e.to_string(),
    })?;
    if !(sweep.f_min <= sweep.f_max) || sweep.steps < 2 {
        return Err(Error::Config {
            path: "sweep".to_string(),
            message: format!(
                "need f_min <= f_max and steps >= 2, got [{}, {}] x {}",
                sweep.f_min, sweep.f_max, sweep.steps
            ),
        });
    }

    let warnings = circuit.warnings().into_iter().map(|w| format!("circuit: {w}")).collect();

    Ok(ParsedConfig {
        config: RunConfig { circuit, basis, rates, sweep, output },
        applied_defaults: defaults,
        warnings,
    })
}
