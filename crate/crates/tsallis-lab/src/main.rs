//! Command-line surface: batch evaluation, axiom sweeps, orbit traces,
//! reconstruction checks, and the kernel experiment, all emitting
//! replayable reports.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use tsallis_lab::axioms::{self, SampleSpec, FLOAT_TOLERANCE};
use tsallis_lab::characterization::{
    self, CharError, Delta2Restriction, MergeStrategy,
};
use tsallis_lab::functionals::{
    ClosedForm, EntropyFunctional, FunctionalRef, Perturbed, Shannon, Tabulated,
    Tsallis,
};
use tsallis_lab::kernel::{self, KernelError};
use tsallis_lab::simplex::{parse_rational, Rational, StochasticVector};
use tsallis_lab::value::{Alpha, EntropyValue, Precision};
use tsallis_lab::VERSION;

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

#[derive(Parser)]
#[command(name = "tsallis-lab", version, about = "Exact laboratory for entropy additivity identities")]
struct Cli {
    /// Working precision in bits for inexact evaluation; the
    /// TSALLIS_LAB_PRECISION_BITS environment variable is used when the
    /// flag is absent.
    #[arg(long, global = true)]
    precision_bits: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum OutputFormat {
    Json,
    Csv,
    Plain,
}

#[derive(Args, Serialize, Clone)]
struct FunctionalArgs {
    /// tsallis | shannon | closed-form | table:PATH
    #[arg(long, default_value = "tsallis")]
    functional: String,

    /// Entropic index; rational (e.g. 3, 3/2) or decimal.
    #[arg(long, default_value = "2")]
    alpha: String,

    /// Normalization constant for closed-form (defaults to the value the
    /// definition assigns to the two-point uniform vector).
    #[arg(long)]
    c: Option<String>,

    /// Perturb the functional at this vector...
    #[arg(long)]
    perturb_at: Option<String>,

    /// ...by this rational amount.
    #[arg(long, default_value = "1/1000")]
    perturb_delta: String,
}

#[derive(Args, Serialize, Clone)]
struct SweepArgs {
    #[arg(long, default_value_t = 6)]
    max_denominator: u32,
    #[arg(long, default_value_t = 4)]
    max_length: u32,
    #[arg(long, default_value_t = 0)]
    samples: u32,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Evaluate a functional at one stochastic vector.
    Entropy {
        #[command(flatten)]
        functional: FunctionalArgs,
        #[arg(long)]
        vector: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Run the full axiom suite and emit a JSON report.
    Axioms {
        #[command(flatten)]
        functional: FunctionalArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Sweep the two-point relation residual over p = a/b.
    Lemma1 {
        #[command(flatten)]
        functional: FunctionalArgs,
        #[arg(long, default_value_t = 20)]
        max_denominator: u32,
    },
    /// Sweep the α=2 sum-identity residual over p = a/b.
    Alpha2sum {
        #[command(flatten)]
        functional: FunctionalArgs,
        #[arg(long, default_value_t = 20)]
        max_denominator: u32,
    },
    /// Trace the interval-map orbit of p as CSV.
    Orbit {
        #[arg(long)]
        p: String,
        /// Map applications allowed before giving up (default: the
        /// denominator of p, which always suffices).
        #[arg(long)]
        max_steps: Option<usize>,
    },
    /// Rebuild a value from two-component data and compare merge orders.
    Reconstruct {
        #[command(flatten)]
        functional: FunctionalArgs,
        #[arg(long)]
        vector: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Consistent)]
        strategy: StrategyArg,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Evaluate the rational-grid route and compare to the closed form.
    Rational {
        #[arg(long, default_value = "2")]
        alpha: String,
        #[arg(long)]
        vector: String,
        #[arg(long)]
        c: Option<String>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plain)]
        format: OutputFormat,
    },
    /// Grid additivity constraints and their exact null space.
    Kernel {
        #[arg(long, default_value_t = 4)]
        b: u64,
        #[arg(long, default_value_t = 3)]
        max_len: usize,
        #[arg(long, default_value_t = 2)]
        alpha: u64,
        /// Abort if the grid would exceed this many vectors.
        #[arg(long, default_value_t = 200_000)]
        cap: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum StrategyArg {
    Leftmost,
    Rightmost,
    LargestMass,
    Consistent,
}

impl From<StrategyArg> for MergeStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Leftmost => MergeStrategy::LeftmostFirst,
            StrategyArg::Rightmost => MergeStrategy::RightmostFirst,
            StrategyArg::LargestMass => MergeStrategy::LargestMassFirst,
            StrategyArg::Consistent => MergeStrategy::Consistent,
        }
    }
}

fn usage_err(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn resolve_precision(flag: Option<usize>) -> Precision {
    flag.or_else(|| {
        std::env::var("TSALLIS_LAB_PRECISION_BITS")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .map(Precision)
    .unwrap_or_default()
}

fn build_functional(
    args: &FunctionalArgs,
    prec: Precision,
) -> Result<(FunctionalRef, Alpha), String> {
    let alpha = Alpha::parse(&args.alpha).map_err(|e| e.to_string())?;
    let base: FunctionalRef = match args.functional.as_str() {
        "tsallis" => {
            if alpha.is_one() {
                Arc::new(Shannon::new(prec))
            } else {
                Arc::new(Tsallis::new(alpha.clone(), prec).map_err(|e| e.to_string())?)
            }
        }
        "shannon" => Arc::new(Shannon::new(prec)),
        "closed-form" => {
            let c = match &args.c {
                Some(s) => EntropyValue::from_rational(
                    parse_rational(s).map_err(|e| e.to_string())?,
                ),
                None => default_constant(&alpha, prec),
            };
            Arc::new(ClosedForm::new(alpha.clone(), c, prec))
        }
        other => {
            if let Some(path) = other.strip_prefix("table:") {
                let fallback: FunctionalRef = if alpha.is_one() {
                    Arc::new(Shannon::new(prec))
                } else {
                    Arc::new(Tsallis::new(alpha.clone(), prec).map_err(|e| e.to_string())?)
                };
                Arc::new(
                    Tabulated::from_file(std::path::Path::new(path), fallback)
                        .map_err(|e| e.to_string())?,
                )
            } else {
                return Err(format!(
                    "unknown functional {other:?}; expected tsallis | shannon | closed-form | table:PATH"
                ));
            }
        }
    };
    let f: FunctionalRef = match &args.perturb_at {
        Some(at) => {
            let at: StochasticVector = at.parse().map_err(|e: _| format!("{e}"))?;
            let delta = parse_rational(&args.perturb_delta).map_err(|e| e.to_string())?;
            Arc::new(Perturbed::new(base, at, delta))
        }
        None => base,
    };
    Ok((f, alpha))
}

/// The constant assigned to the two-point uniform vector by the defining
/// formula for the given index.
fn default_constant(alpha: &Alpha, prec: Precision) -> EntropyValue {
    if alpha.is_one() {
        return Shannon::new(prec).eval(&StochasticVector::uniform(2));
    }
    tsallis_lab::functionals::tsallis(&StochasticVector::uniform(2), alpha, prec)
        .expect("alpha != 1")
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| e.to_string()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Wraps a deterministic result body with the replay metadata. The
/// timestamp is the only nondeterministic field and occupies exactly one
/// line of the pretty-printed output.
fn report_json(config: serde_json::Value, results: serde_json::Value) -> String {
    let doc = json!({
        "version": VERSION,
        "timestamp": timestamp(),
        "config": config,
        "results": results,
    });
    serde_json::to_string_pretty(&doc).expect("serializable report")
}

/// Farey-style sweep points: all a/b in lowest terms, b up to the bound,
/// 0 <= a <= b, plus the endpoints.
fn sweep_points(max_denominator: u32) -> Vec<Rational> {
    let mut points = vec![Rational::zero(), Rational::from_integer(1.into())];
    for b in 2..=max_denominator as u64 {
        for a in 1..b {
            if a.gcd(&b) == 1 {
                points.push(Rational::new(a.into(), b.into()));
            }
        }
    }
    points.sort();
    points
}

struct SweepOutcome {
    instances: usize,
    max_abs: f64,
    exact_mode: bool,
    exact_nonzero: bool,
    witness: Option<(Rational, EntropyValue)>,
}

fn sweep_residuals(
    points: &[Rational],
    mut residual: impl FnMut(&Rational) -> EntropyValue,
) -> SweepOutcome {
    let mut out = SweepOutcome {
        instances: 0,
        max_abs: 0.0,
        exact_mode: true,
        exact_nonzero: false,
        witness: None,
    };
    for p in points {
        let r = residual(p);
        out.instances += 1;
        match r.exact() {
            Some(x) => {
                if !x.is_zero() {
                    out.exact_nonzero = true;
                }
            }
            None => out.exact_mode = false,
        }
        let abs = r.approx().abs();
        if abs > out.max_abs || out.witness.is_none() {
            out.max_abs = abs;
            out.witness = Some((p.clone(), r));
        }
    }
    out
}

impl SweepOutcome {
    fn violated(&self) -> bool {
        if self.exact_mode {
            self.exact_nonzero
        } else {
            self.max_abs > FLOAT_TOLERANCE
        }
    }

    fn to_json(&self) -> serde_json::Value {
        json!({
            "instances": self.instances,
            "max_abs_residual": self.max_abs,
            "exact_mode": self.exact_mode,
            "violated": self.violated(),
            "witness": self.witness.as_ref().map(|(p, r)| json!({
                "p": p.to_string(),
                "residual": r,
            })),
        })
    }
}

fn run(cli: Cli) -> Result<ExitCode, ExitCode> {
    let prec = resolve_precision(cli.precision_bits);
    let output = &cli.output;
    match &cli.command {
        Command::Entropy {
            functional,
            vector,
            format,
        } => {
            let (f, _) = build_functional(functional, prec).map_err(usage_err)?;
            let v: StochasticVector = vector.parse().map_err(usage_err)?;
            let value = f.eval(&v);
            let text = match format {
                OutputFormat::Json => report_json(
                    json!({
                        "command": "entropy",
                        "functional": functional,
                        "vector": vector,
                        "precision_bits": prec.0,
                    }),
                    json!({ "value": value }),
                ),
                _ => value.to_string(),
            };
            emit(output, &text).map_err(usage_err)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Axioms { functional, sweep } => {
            let (f, alpha) = build_functional(functional, prec).map_err(usage_err)?;
            let spec = SampleSpec::new(
                sweep.max_denominator,
                sweep.max_length,
                sweep.samples,
                sweep.seed,
            );
            let reports = axioms::full_report(f.as_ref(), &alpha, &spec, prec);
            let all_ok = axioms::all_passed(&reports);
            let text = report_json(
                json!({
                    "command": "axioms",
                    "functional": functional,
                    "sweep": sweep,
                    "precision_bits": prec.0,
                }),
                serde_json::to_value(&reports).expect("serializable"),
            );
            emit(output, &text).map_err(usage_err)?;
            Ok(if all_ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATION)
            })
        }
        Command::Lemma1 {
            functional,
            max_denominator,
        } => {
            let (f, alpha) = build_functional(functional, prec).map_err(usage_err)?;
            let points = sweep_points(*max_denominator);
            let outcome = sweep_residuals(&points, |p| {
                characterization::lemma1_residual(f.as_ref(), &alpha, p, prec)
            });
            let text = report_json(
                json!({
                    "command": "lemma1",
                    "functional": functional,
                    "max_denominator": max_denominator,
                    "precision_bits": prec.0,
                }),
                outcome.to_json(),
            );
            emit(output, &text).map_err(usage_err)?;
            Ok(if outcome.violated() {
                ExitCode::from(EXIT_VIOLATION)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Alpha2sum {
            functional,
            max_denominator,
        } => {
            let (f, _) = build_functional(functional, prec).map_err(usage_err)?;
            let points = sweep_points(*max_denominator);
            let outcome = sweep_residuals(&points, |p| {
                characterization::alpha2_sum_residual(f.as_ref(), p, prec)
            });
            let text = report_json(
                json!({
                    "command": "alpha2sum",
                    "functional": functional,
                    "max_denominator": max_denominator,
                    "precision_bits": prec.0,
                }),
                outcome.to_json(),
            );
            emit(output, &text).map_err(usage_err)?;
            Ok(if outcome.violated() {
                ExitCode::from(EXIT_VIOLATION)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Orbit { p, max_steps } => {
            let p = parse_rational(p).map_err(usage_err)?;
            let steps = max_steps.unwrap_or_else(|| {
                use num_traits::ToPrimitive;
                p.denom().to_usize().unwrap_or(usize::MAX)
            });
            match characterization::orbit(&p, steps) {
                Ok(trace) => {
                    let csv = trace.to_csv();
                    emit(output, csv.trim_end()).map_err(usage_err)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(CharError::StepLimitExceeded(n)) => {
                    eprintln!("error: orbit did not terminate within {n} steps");
                    Err(ExitCode::from(EXIT_RESOURCE))
                }
                Err(e) => Err(usage_err(e)),
            }
        }
        Command::Reconstruct {
            functional,
            vector,
            strategy,
            format,
        } => {
            let (f, alpha) = build_functional(functional, prec).map_err(usage_err)?;
            let v: StochasticVector = vector.parse().map_err(usage_err)?;
            let base = Delta2Restriction::from_functional(f);
            match characterization::reconstruct_from_pairs(
                &base,
                &alpha,
                &v,
                (*strategy).into(),
                prec,
            ) {
                Ok(value) => {
                    let text = match format {
                        OutputFormat::Json => report_json(
                            json!({
                                "command": "reconstruct",
                                "functional": functional,
                                "vector": vector,
                                "strategy": strategy,
                                "precision_bits": prec.0,
                            }),
                            json!({ "value": value }),
                        ),
                        _ => value.to_string(),
                    };
                    emit(output, &text).map_err(usage_err)?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e @ CharError::AmbiguousReconstruction { .. }) => {
                    eprintln!("violation: {e}");
                    Err(ExitCode::from(EXIT_VIOLATION))
                }
                Err(e) => Err(usage_err(e)),
            }
        }
        Command::Rational {
            alpha,
            vector,
            c,
            format,
        } => {
            let alpha = Alpha::parse(alpha).map_err(usage_err)?;
            let v: StochasticVector = vector.parse().map_err(usage_err)?;
            let c = match c {
                Some(s) => EntropyValue::from_rational(
                    parse_rational(s).map_err(usage_err)?,
                ),
                None => default_constant(&alpha, prec),
            };
            let route =
                characterization::rational_reconstruct(&alpha, &v, &c, prec)
                    .map_err(usage_err)?;
            let closed =
                tsallis_lab::functionals::closed_form(&v, &alpha, &c, prec);
            let diff = &route - &closed;
            let agrees = match diff.exact() {
                Some(r) => r.is_zero(),
                None => diff.approx().abs() <= FLOAT_TOLERANCE,
            };
            let text = match format {
                OutputFormat::Json => report_json(
                    json!({
                        "command": "rational",
                        "alpha": alpha.to_string(),
                        "vector": vector,
                        "precision_bits": prec.0,
                    }),
                    json!({
                        "route_value": route,
                        "closed_form": closed,
                        "agrees": agrees,
                    }),
                ),
                _ => format!("{route}"),
            };
            emit(output, &text).map_err(usage_err)?;
            Ok(if agrees {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATION)
            })
        }
        Command::Kernel {
            b,
            max_len,
            alpha,
            cap,
        } => match kernel::run_experiment(*b, *max_len, *alpha, *cap) {
            Ok(report) => {
                let text = report_json(
                    json!({
                        "command": "kernel",
                        "b": b,
                        "max_len": max_len,
                        "alpha": alpha,
                        "cap": cap,
                    }),
                    serde_json::to_value(&report).expect("serializable"),
                );
                emit(output, &text).map_err(usage_err)?;
                Ok(if report.closed_form_in_kernel {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(EXIT_VIOLATION)
                })
            }
            Err(e @ KernelError::SizeLimit { .. }) => {
                eprintln!("error: {e}");
                Err(ExitCode::from(EXIT_RESOURCE))
            }
            Err(e) => Err(usage_err(e)),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) | Err(code) => code,
    }
}
