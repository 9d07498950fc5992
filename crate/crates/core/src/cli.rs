//! Command-line front end. [`run`] takes the argument vector and an output
//! sink and returns the process exit code.
//!
//! Exit codes: 0 success or valid, 1 counterexample or obstruction found,
//! 2 usage or parse error, 3 budget exceeded.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::Q01;
use crate::carriers::{is_infinitesimal, radical, split_top_level, Carrier, Certificate, Value};
use crate::corpus::delta_suite;
use crate::decide::{decide, sample_falsify, DecideConfig, Verdict};
use crate::gammaxi::{gamma_of_xi, xi_chain_iso};
use crate::plfunc::{random_plfunc, reconstruct_half, uniform_dist, pl_scale, PLFunc};
use crate::spectrum::{eta, pl_point_kernels, spectrum};
use crate::term::{evaluate, parse, parse_equation};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Tunable limits shared by the subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    pub piece_budget: usize,
    pub sample_trials: u64,
    pub seed: u64,
    pub dyadic_depth: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config { piece_budget: 65536, sample_trials: 1000, seed: 0, dyadic_depth: 8 }
    }
}

#[derive(Parser, Debug)]
#[command(name = "mvdelta", about = "Exact MV-algebra and δ-algebra toolkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide an equation `l = r` or inequation `l <= r`.
    Check {
        equation: String,
        /// Only search for a counterexample on random dyadic points.
        #[arg(long)]
        sample_only: bool,
        #[arg(long, default_value_t = Config::default().sample_trials)]
        trials: u64,
        #[arg(long, default_value_t = Config::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = Config::default().piece_budget)]
        budget: usize,
        /// Sample points are `k/2^depth`.
        #[arg(long, default_value_t = Config::default().dyadic_depth)]
        depth: u32,
    },
    /// Evaluate a term in a carrier.
    Eval {
        term: String,
        #[arg(long, default_value = "unit")]
        carrier: String,
        /// Comma-separated `name=value`; PL functions as `name=@file.json`.
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Check the δ-algebra identities on random elements of a carrier.
    Axioms {
        #[arg(long, default_value = "pl")]
        carrier: String,
        #[arg(long, default_value_t = Config::default().sample_trials)]
        trials: u64,
        #[arg(long, default_value_t = Config::default().seed)]
        seed: u64,
    },
    /// Maximal ideals, Hölder homomorphisms and closed sets.
    Spectrum {
        #[arg(long)]
        algebra: String,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Good-sequence checks for the chain `Ł_n`.
    Gammaxi {
        #[arg(long)]
        chain: u32,
        #[arg(long)]
        bound: u32,
    },
    /// Reconstruct `target/2` by a truncated Isbell series.
    Isbell {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        depth: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// The radical of a carrier, or whether one element is infinitesimal.
    Radical {
        #[arg(long)]
        carrier: String,
        #[arg(long)]
        element: Option<String>,
    },
}

/// Run the CLI on `argv` (including the program name), writing the report
/// to `out`.
pub fn run<I, S>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(out, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Check { equation, sample_only, trials, seed, budget, depth } => {
            check(out, &equation, sample_only, trials, seed, budget, depth)
        }
        Command::Eval { term, carrier, assign } => eval(out, &term, &carrier, &assign),
        Command::Axioms { carrier, trials, seed } => axioms(out, &carrier, trials, seed),
        Command::Spectrum { algebra, json } => spectrum_cmd(out, &algebra, json),
        Command::Gammaxi { chain, bound } => gammaxi(out, chain, bound),
        Command::Isbell { target, depth, out: path } => isbell(out, &target, depth, &path),
        Command::Radical { carrier, element } => radical_cmd(out, &carrier, element.as_deref()),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            let _ = writeln!(out, "error: {msg}");
            EXIT_USAGE
        }
    }
}

type CmdResult = Result<i32, String>;

fn emit(out: &mut dyn Write, text: impl AsRef<str>) {
    let _ = writeln!(out, "{}", text.as_ref());
}

fn check(out: &mut dyn Write, src: &str, sample_only: bool, trials: u64, seed: u64, budget: usize, depth: u32) -> CmdResult {
    let eq = parse_equation(src).map_err(|e| e.to_string())?;
    if trials == 0 || budget == 0 {
        return Err("trials and budget must be positive".into());
    }
    if sample_only {
        return Ok(match sample_falsify(&eq, trials, seed, depth) {
            Some(cx) => {
                emit(out, format!("Counterexample: {cx}"));
                EXIT_FOUND
            }
            None => {
                emit(out, format!("NoCounterexample ({trials} samples)"));
                EXIT_OK
            }
        });
    }
    let config = DecideConfig { piece_budget: budget, ..DecideConfig::default() };
    Ok(match decide(&eq, config) {
        Verdict::Valid => {
            emit(out, "Valid");
            EXIT_OK
        }
        Verdict::Counterexample(cx) => {
            emit(out, format!("Counterexample: {cx}"));
            EXIT_FOUND
        }
        Verdict::LimitExceeded(report) => {
            emit(out, format!("LimitExceeded: {report}"));
            EXIT_BUDGET
        }
    })
}

fn parse_carrier(spec: &str) -> Result<Carrier, String> {
    spec.parse::<Carrier>().map_err(|e| e.to_string())
}

fn parse_value(carrier: &Carrier, text: &str) -> Result<Value, String> {
    if let Some(path) = text.strip_prefix('@') {
        let json = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let f = PLFunc::from_json(&json).map_err(|e| format!("{path}: {e}"))?;
        let v = Value::Func(f);
        carrier.check(&v).map_err(|e| e.to_string())?;
        return Ok(v);
    }
    carrier.parse_element(text).map_err(|e| e.to_string())
}

fn eval(out: &mut dyn Write, src: &str, spec: &str, assign: &str) -> CmdResult {
    let term = parse(src).map_err(|e| e.to_string())?;
    let carrier = parse_carrier(spec)?;
    let mut env = BTreeMap::new();
    if !assign.trim().is_empty() {
        for part in split_top_level(assign).map_err(|_| format!("malformed assignment `{assign}`"))? {
            let (name, value) = part.split_once('=').ok_or_else(|| format!("expected name=value, got `{part}`"))?;
            env.insert(name.trim().to_string(), parse_value(&carrier, value.trim())?);
        }
    }
    let value = evaluate(&term, &env, &carrier).map_err(|e| e.to_string())?;
    emit(out, carrier.render(&value));
    Ok(EXIT_OK)
}

fn random_value(carrier: &Carrier, rng: &mut ChaCha8Rng) -> Result<Value, String> {
    match carrier {
        Carrier::Pl => Ok(Value::Func(random_plfunc(rng, 3, 8, 6))),
        Carrier::Unit => Ok(Value::Rational(Q01::dyadic(rng.gen_range(0..=256), 8))),
        Carrier::Product(fs) => fs.iter().map(|f| random_value(f, rng)).collect::<Result<_, _>>().map(Value::Tuple),
        other => Err(format!("carrier `{other}` has no δ operation")),
    }
}

fn axioms(out: &mut dyn Write, spec: &str, trials: u64, seed: u64) -> CmdResult {
    let carrier = parse_carrier(spec)?;
    if !carrier.supports_delta() {
        return Err(format!("carrier `{carrier}` has no δ operation"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for item in delta_suite() {
        let vars = item.equation.free_vars();
        let mut failed = None;
        for _ in 0..trials {
            let env: BTreeMap<String, Value> =
                vars.iter().map(|v| Ok((v.clone(), random_value(&carrier, &mut rng)?))).collect::<Result<_, String>>()?;
            let lhs = evaluate(&item.equation.lhs, &env, &carrier).map_err(|e| e.to_string())?;
            let rhs = evaluate(&item.equation.rhs, &env, &carrier).map_err(|e| e.to_string())?;
            if !item.equation.holds_for(&carrier, &lhs, &rhs) && failed.is_none() {
                failed = Some(env);
            }
        }
        match failed {
            None => emit(out, format!("ok   {} ({trials} instances)", item.name)),
            Some(env) => {
                failures += 1;
                let shown: Vec<String> = env.iter().map(|(k, v)| format!("{k}={}", carrier.render(v))).collect();
                emit(out, format!("FAIL {}: {}", item.name, shown.join(", ")));
            }
        }
    }
    Ok(if failures == 0 { EXIT_OK } else { EXIT_FOUND })
}

fn spectrum_cmd(out: &mut dyn Write, spec: &str, json: bool) -> CmdResult {
    let carrier = parse_carrier(spec)?;
    if carrier == Carrier::Chang {
        let report = eta(&carrier, 100).map_err(|e| e.to_string())?;
        emit(out, "algebra: chang");
        emit(out, "maximal ideals: 1 (closed form)");
        emit(out, "  m0 = {(0,k) : k >= 0}");
        emit(out, "homomorphisms:");
        emit(out, "  h0: (0,k) -> 0; (1,-k) -> 1");
        emit(out, format!("eta injective: {}", report.injective));
        return Ok(EXIT_OK);
    }
    if carrier == Carrier::Pl {
        let points: Vec<Q01> = (0..=8).map(|k| Q01::new(k, 8)).collect();
        let report = pl_point_kernels(&points, 50, 0);
        emit(out, "algebra: pl");
        emit(out, "maximal ideals: point kernels {f : f(p) = 0} for p in [0,1] (not enumerable)");
        let shown: Vec<String> = points.iter().map(|p| p.to_string()).collect();
        emit(out, format!("sampled points: {}", shown.join(", ")));
        emit(out, format!("kernels separated: {}", report.separated));
        emit(out, format!("ideal laws on samples: {}", report.ideal_laws));
        return Ok(if report.separated && report.ideal_laws { EXIT_OK } else { EXIT_FOUND });
    }
    let result = spectrum(&carrier).map_err(|e| e.to_string())?;
    if json {
        emit(out, serde_json::to_string_pretty(&result.to_json()).expect("JSON values serialise"));
    } else {
        let _ = write!(out, "{}", result.to_table());
        let report = eta(&carrier, 0).map_err(|e| e.to_string())?;
        emit(out, format!("eta injective: {}", report.injective));
        emit(out, format!("semisimple: {}", report.radical_trivial));
    }
    Ok(EXIT_OK)
}

fn gammaxi(out: &mut dyn Write, n: u32, bound: u32) -> CmdResult {
    if n == 0 {
        return Err("chain order must be positive".into());
    }
    let iso = xi_chain_iso(n, bound);
    emit(out, format!("chain:{n} good sequences with sum <= {bound}: {}", iso.sequences));
    emit(out, format!("  closed form (1,...,1,k/n): {}", iso.matches_closed_form));
    emit(out, format!("  entry sum bijective: {}", iso.bijective));
    emit(out, format!("  entry sum additive: {}", iso.additive));
    emit(out, format!("  entry sum order-preserving: {}", iso.order_preserving));
    emit(out, format!("  unit maps to {n}: {}", iso.unit_maps_to_n));
    let gamma = gamma_of_xi(&Carrier::Chain(n), 2).map_err(|e| e.to_string())?;
    emit(out, format!("gamma of xi: {} elements (carrier has {})", gamma.gamma_size, gamma.carrier_size));
    emit(out, format!("  bijective: {}", gamma.injective && gamma.surjective));
    emit(out, format!("  preserves oplus: {}", gamma.preserves_oplus));
    emit(out, format!("  preserves neg: {}", gamma.preserves_neg));
    Ok(if iso.ok() && gamma.ok() { EXIT_OK } else { EXIT_FOUND })
}

fn isbell(out: &mut dyn Write, target: &PathBuf, depth: u32, path: &PathBuf) -> CmdResult {
    if depth == 0 {
        return Err("depth must be positive".into());
    }
    let json = std::fs::read_to_string(target).map_err(|e| format!("{}: {e}", target.display()))?;
    let f = PLFunc::from_json(&json).map_err(|e| format!("{}: {e}", target.display()))?;
    let result = match reconstruct_half(&f, depth) {
        Ok(r) => r,
        Err(e) => {
            emit(out, format!("hypothesis violated: {e}"));
            return Ok(EXIT_FOUND);
        }
    };
    let distance = uniform_dist(&result.result, &pl_scale(&Q01::new(1, 2), &f));
    std::fs::write(path, result.result.to_json() + "\n").map_err(|e| format!("{}: {e}", path.display()))?;
    emit(out, format!("depth: {depth}"));
    emit(out, format!("breakpoints: {}", result.result.points().len()));
    emit(out, format!("error bound: {}", result.error_bound));
    emit(out, format!("distance to target/2: {distance}"));
    emit(out, format!("written: {}", path.display()));
    Ok(if distance <= result.error_bound { EXIT_OK } else { EXIT_FOUND })
}

fn radical_cmd(out: &mut dyn Write, spec: &str, element: Option<&str>) -> CmdResult {
    let carrier = parse_carrier(spec)?;
    match element {
        None => {
            let rad = radical(&carrier).map_err(|e| e.to_string())?;
            emit(out, format!("radical: {}", rad.describe(&carrier)));
            emit(out, format!("semisimple: {}", rad.is_trivial(&carrier)));
        }
        Some(text) => {
            let x = parse_value(&carrier, text)?;
            let report = is_infinitesimal(&carrier, &x).map_err(|e| e.to_string())?;
            let why = match report.certificate {
                Certificate::Zero => "zero element".to_string(),
                Certificate::ClosedForm(reason) => reason.to_string(),
                Certificate::FailsAt(n) => format!("{n}x is not below neg(x)"),
                Certificate::Exhausted(n) => format!("nx <= neg(x) for all n <= {n}"),
            };
            emit(out, format!("{}: infinitesimal={} ({why})", carrier.render(&x), report.infinitesimal));
        }
    }
    Ok(EXIT_OK)
}
