//! `logent`: logical-entropy checks for quantum states, channels and
//! measurements from the command line.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 an inequality that
//! must hold for the given input was violated, 64 bad usage or bad input.

use std::f64::consts::PI;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Map, Value};

use logent::channel::{self, CouplingModel};
use logent::classical::{self, Distribution, Partition};
use logent::fuzz::{self, FuzzConfig, Suite};
use logent::measurement;
use logent::mixing::{self, Ensemble};
use logent::state::DensityMatrix;
use logent::zoo::{self, AmplitudeDamping};

const EXIT_OK: u8 = 0;
const EXIT_PROPERTY: u8 = 1;
const EXIT_CONTRADICTION: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "logent", version, about = "Logical entropy of quantum states and channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Logical entropy and purity of a density matrix.
    Entropy {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Entropy after coupling to an environment, against the off-block bound.
    Bound {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Output state of the reduced channel.
    Apply {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Kraus operators of the reduced channel.
    Kraus {
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Amplitude-damping sweep over a grid of angles, numeric and closed form.
    Sweep {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = ChannelKind::AmplitudeDamping)]
        channel: ChannelKind,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta_start: f64,
        #[arg(long, default_value_t = PI, allow_negative_numbers = true)]
        theta_end: f64,
        #[arg(long, default_value_t = 64)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Seeded randomized campaign over one suite or all of them.
    Fuzz {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 6)]
        dim_s: usize,
        #[arg(long, default_value_t = 4)]
        dim_e: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Entropy of a purified input after noise, against its off-block bound.
    Exchange {
        #[arg(long)]
        state: PathBuf,
        #[command(flatten)]
        channel: ChannelArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Purity split of a state under a basis-aligned projective measurement.
    Prop1 {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Entropy of a mixture against the entropy of its weights.
    Prop2 {
        #[arg(long)]
        ensemble: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Partition entropy of a distribution, classically and via measurement.
    Bridge {
        #[arg(long)]
        distribution: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ChannelArgs {
    /// Coupling model JSON file.
    #[arg(long, conflicts_with = "channel")]
    model: Option<PathBuf>,
    #[arg(long, value_enum, requires = "theta")]
    channel: Option<ChannelKind>,
    #[arg(long, allow_negative_numbers = true)]
    theta: Option<f64>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ChannelKind {
    AmplitudeDamping,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
    Human,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SuiteArg {
    Theorem,
    Prop1,
    Prop2,
    Schmidt,
    Bridge,
    All,
}

impl SuiteArg {
    fn suites(self) -> Vec<Suite> {
        match self {
            SuiteArg::Theorem => vec![Suite::Theorem],
            SuiteArg::Prop1 => vec![Suite::Prop1],
            SuiteArg::Prop2 => vec![Suite::Prop2],
            SuiteArg::Schmidt => vec![Suite::Schmidt],
            SuiteArg::Bridge => vec![Suite::Bridge],
            SuiteArg::All => Suite::ALL.to_vec(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { EXIT_OK });
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(command: Command) -> Result<u8> {
    match command {
        Command::Entropy { state, common } => {
            common.validate()?;
            let rho: DensityMatrix = read_json(&state)?;
            let out = json!({
                "logical_entropy": rho.logical_entropy(),
                "purity": rho.purity(),
            });
            emit(&common, Format::Json, &out)?;
            Ok(EXIT_OK)
        }
        Command::Bound {
            state,
            channel,
            common,
        } => {
            common.validate()?;
            let rho: DensityMatrix = read_json(&state)?;
            let model = channel.model()?;
            let report = channel::verify_theorem(&rho, &model)?;
            emit(&common, Format::Json, &report)?;
            Ok(if report.hypothesis_pure && report.slack < -common.tol {
                EXIT_CONTRADICTION
            } else {
                EXIT_OK
            })
        }
        Command::Apply {
            state,
            channel,
            common,
        } => {
            common.validate()?;
            let rho: DensityMatrix = read_json(&state)?;
            let kraus = channel::extract_kraus(&channel.model()?)?;
            let out = channel::apply_channel(&rho, &kraus)?;
            emit(&common, Format::Json, &out)?;
            Ok(EXIT_OK)
        }
        Command::Kraus { channel, common } => {
            common.validate()?;
            let kraus = channel::extract_kraus(&channel.model()?)?;
            let out = json!({
                "ops": kraus.ops(),
                "completeness_deviation": kraus.completeness_deviation(),
            });
            emit(&common, Format::Json, &out)?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            state,
            channel: _,
            theta_start,
            theta_end,
            steps,
            common,
        } => {
            common.validate()?;
            if steps < 2 {
                bail!("--steps must be at least 2");
            }
            if !theta_start.is_finite() || !theta_end.is_finite() {
                bail!("theta range must be finite");
            }
            let rho: DensityMatrix = read_json(&state)?;
            sweep(&rho, theta_start, theta_end, steps, &common)
        }
        Command::Fuzz {
            suite,
            trials,
            dim_s,
            dim_e,
            common,
        } => {
            common.validate()?;
            if trials == 0 {
                bail!("--trials must be at least 1");
            }
            if dim_s == 0 || dim_e == 0 {
                bail!("--dim-s and --dim-e must be at least 1");
            }
            let cfg = FuzzConfig {
                trials,
                seed: common.seed,
                max_dim_s: dim_s,
                max_dim_e: dim_e,
                ..FuzzConfig::default()
            };
            let summaries: Vec<_> = suite
                .suites()
                .into_iter()
                .map(|s| fuzz::run_suite(s, &cfg))
                .collect();
            let failed = summaries.iter().any(|s| s.failures > 0);
            if summaries.len() == 1 {
                emit(&common, Format::Json, &summaries[0])?;
            } else {
                emit(&common, Format::Json, &summaries)?;
            }
            Ok(if failed { EXIT_PROPERTY } else { EXIT_OK })
        }
        Command::Exchange {
            state,
            channel,
            common,
        } => {
            common.validate()?;
            let rho: DensityMatrix = read_json(&state)?;
            let report = channel::exchange_entropy(&rho, &channel.model()?)?;
            emit(&common, Format::Json, &report)?;
            Ok(if report.slack < -common.tol {
                EXIT_CONTRADICTION
            } else {
                EXIT_OK
            })
        }
        Command::Prop1 {
            state,
            partition,
            common,
        } => {
            common.validate()?;
            let rho: DensityMatrix = read_json(&state)?;
            let part: Partition = read_json(&partition)?;
            let ps = measurement::projectors_from_partition(&part, rho.dim())?;
            let dec = measurement::proposition1_decomposition(&rho, &ps)?;
            let gain = measurement::corollary1_check(&rho, &ps)?;
            let entropy = rho.logical_entropy();
            let holds = dec.residual() <= common.tol
                && (gain - dec.off_block_mass).abs() <= common.tol
                && gain >= -common.tol;
            let out = json!({
                "purity": dec.purity,
                "projected_purity": dec.projected_purity,
                "off_block_mass": dec.off_block_mass,
                "residual": dec.residual(),
                "entropy": entropy,
                "projected_entropy": entropy + gain,
                "entropy_gain": gain,
                "holds": holds,
            });
            emit(&common, Format::Json, &out)?;
            Ok(if holds { EXIT_OK } else { EXIT_PROPERTY })
        }
        Command::Prop2 { ensemble, common } => {
            common.validate()?;
            let e: Ensemble = read_json(&ensemble)?;
            let report = mixing::proposition2_check(&e);
            let holds = report.slack >= -common.tol;
            emit(&common, Format::Json, &report)?;
            Ok(if holds { EXIT_OK } else { EXIT_CONTRADICTION })
        }
        Command::Bridge {
            distribution,
            partition,
            common,
        } => {
            common.validate()?;
            let p: Distribution = read_json(&distribution)?;
            let part: Partition = read_json(&partition)?;
            let report = classical::bridge_report(&p, &part)?;
            let holds = report.difference <= common.tol;
            emit(&common, Format::Json, &report)?;
            Ok(if holds { EXIT_OK } else { EXIT_PROPERTY })
        }
    }
}

impl Common {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            bail!("--tol must be positive and finite");
        }
        Ok(())
    }
}

impl ChannelArgs {
    fn model(&self) -> Result<CouplingModel> {
        match (&self.model, self.channel, self.theta) {
            (Some(path), None, None) => read_json(path),
            (None, Some(ChannelKind::AmplitudeDamping), Some(theta)) => {
                if !theta.is_finite() {
                    bail!("--theta must be finite");
                }
                Ok(AmplitudeDamping::new(theta).model())
            }
            (Some(_), _, Some(_)) => bail!("--theta applies only to --channel"),
            _ => bail!("give either --model FILE or --channel amplitude-damping --theta X"),
        }
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

const SWEEP_HEADER: [&str; 6] = [
    "theta",
    "entropy",
    "bound",
    "closed_form_entropy",
    "closed_form_bound",
    "slack",
];

fn sweep(rho: &DensityMatrix, start: f64, end: f64, steps: usize, common: &Common) -> Result<u8> {
    let mut rows = Vec::with_capacity(steps);
    let mut all_hold = true;
    for k in 0..steps {
        let theta = start + (end - start) * k as f64 / (steps - 1) as f64;
        let r = zoo::ad_verify_state(rho, theta)?;
        all_hold &= r.holds();
        rows.push([
            theta,
            r.entropy,
            r.bound,
            r.closed_form_entropy,
            r.closed_form_bound,
            r.bound - r.entropy,
        ]);
    }
    let format = common.format.unwrap_or(Format::Csv);
    let text = match format {
        Format::Csv => {
            let mut s = SWEEP_HEADER.join(",");
            s.push('\n');
            for row in &rows {
                let cells: Vec<String> = row.iter().map(|x| format!("{x:?}")).collect();
                s.push_str(&cells.join(","));
                s.push('\n');
            }
            s
        }
        Format::Json | Format::Human => {
            let objects: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let map: Map<String, Value> = SWEEP_HEADER
                        .iter()
                        .zip(row)
                        .map(|(k, v)| (k.to_string(), json!(v)))
                        .collect();
                    Value::Object(map)
                })
                .collect();
            if format == Format::Json {
                let mut s = serde_json::to_string(&objects)?;
                s.push('\n');
                s
            } else {
                objects.iter().map(human).collect::<Vec<_>>().join("\n")
            }
        }
    };
    write_out(common, &text)?;
    Ok(if all_hold { EXIT_OK } else { EXIT_PROPERTY })
}

/// Renders `value` in the requested format and writes it.
fn emit<T: Serialize>(common: &Common, default: Format, value: &T) -> Result<()> {
    let value = serde_json::to_value(value)?;
    let text = match common.format.unwrap_or(default) {
        Format::Json => {
            let mut s = serde_json::to_string(&value)?;
            s.push('\n');
            s
        }
        Format::Human => human(&value),
        Format::Csv => csv_record(&value)?,
    };
    write_out(common, &text)
}

fn write_out(common: &Common, text: &str) -> Result<()> {
    match &common.output {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

/// One `key: value` line per field; nested values stay as compact JSON.
fn human(value: &Value) -> String {
    match value {
        Value::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            let mut s = String::new();
            for (k, v) in map {
                s.push_str(&format!("{k:<width$}  {}\n", scalar_text(v)));
            }
            s
        }
        Value::Array(items) => items.iter().map(human).collect::<Vec<_>>().join("\n"),
        other => format!("{}\n", scalar_text(other)),
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Header line plus one record for a flat object (or one record per element
/// of an array of flat objects with the same keys).
fn csv_record(value: &Value) -> Result<String> {
    let records: Vec<&Map<String, Value>> = match value {
        Value::Object(map) => vec![map],
        Value::Array(items) => items
            .iter()
            .map(|v| v.as_object().context("csv output needs flat records"))
            .collect::<Result<_>>()?,
        _ => bail!("csv output needs flat records"),
    };
    let Some(first) = records.first() else {
        return Ok(String::new());
    };
    let keys: Vec<&String> = first
        .iter()
        .filter(|(_, v)| !v.is_object() && !v.is_array())
        .map(|(k, _)| k)
        .collect();
    if keys.len() != first.len() {
        bail!("csv output is not available for nested values; use --format json");
    }
    let mut s = keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(",");
    s.push('\n');
    for rec in records {
        let cells: Vec<String> = keys
            .iter()
            .map(|k| rec.get(*k).map(scalar_text).unwrap_or_default())
            .collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    Ok(s)
}
