use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use totpos::completion::stn_complete;
use totpos::generators::Generator;
use totpos::kernels::{sample_kernel, KernelSpec};
use totpos::linalg::io::{matrix_from_csv, matrix_from_json, matrix_to_csv};
use totpos::linalg::{parse_rational, Matrix, OrderReport, OrderedPoints, Tolerance};
use totpos::transforms::{apply, classify, MixedPowerTransform, Mode, OrderSpec, Outcome};
use totpos::verify::{
    empirical_preservation, refute, run_catalog, search_counterexample, EntryStatus, Family, RefutationOutcome,
    SearchBudget, SearchOutcome, VerificationReport,
};

/// Total positivity toolkit: orders, transforms, completions, test data and
/// the verification harness.
#[derive(Parser)]
#[command(name = "totpos", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderMode {
    Tn,
    Tp,
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    Tn,
    Tp,
    Stn,
    Stp,
}

impl From<Class> for Mode {
    fn from(c: Class) -> Mode {
        match c {
            Class::Tn => Mode::Tn,
            Class::Tp => Mode::Tp,
            Class::Stn => Mode::Stn,
            Class::Stp => Mode::Stp,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// TN or TP order of a matrix file (JSON, or CSV for floats; `-` reads stdin).
    Check {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderMode::Tn)]
        mode: OrderMode,
        /// Largest minor size to inspect.
        #[arg(long)]
        kmax: Option<usize>,
        /// Read float entries as exact rationals.
        #[arg(long, conflicts_with = "tol")]
        exact: bool,
        /// Zero tolerance for float minors.
        #[arg(long)]
        tol: Option<f64>,
        /// Use the tolerance as an absolute bound instead of a relative one.
        #[arg(long, requires = "tol")]
        absolute: bool,
    },
    /// Apply a mixed power transform entrywise to one matrix per coordinate.
    Apply {
        /// Transform JSON, or @path to a file holding it.
        #[arg(long)]
        transform: String,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Complete a 2×2 TN matrix to a 3×3 symmetric TN matrix.
    Complete { input: PathBuf },
    /// Draw a random TN/TP/STN/STP matrix.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        class: Class,
        #[arg(long)]
        seed: Option<u64>,
        /// Parameter range as lo,hi.
        #[arg(long, value_parser = parse_pair, default_value = "0.25,4")]
        range: (f64, f64),
        /// Probability of a zero factor parameter (TN classes).
        #[arg(long, default_value_t = 0.3)]
        zero_prob: f64,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Run catalog entries and counterexample searches.
    Verify {
        /// `all` or a comma-separated list of entry ids.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Randomized counterexample search in one family.
    Search {
        /// Family JSON, e.g. {"family":"jain_power","alpha":0.5,"r":3}, or @path.
        #[arg(long)]
        family: String,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Sample a kernel on point grids.
    Sample {
        /// Kernel JSON, e.g. {"kind":"jain"}, or @path.
        #[arg(long)]
        kernel: String,
        /// Comma-separated row points (decimals and fractions are exact).
        #[arg(long)]
        x: String,
        /// Column points; defaults to the row points.
        #[arg(long)]
        y: Option<String>,
        #[command(flatten)]
        out: OutputArg,
    },
    /// Decide whether a transform preserves the given orders, optionally
    /// backing the verdict with a refutation or random trials.
    Classify {
        #[arg(long)]
        transform: String,
        /// Order spec JSON, e.g. {"k":[3],"l":3,"size_x":3,"size_y":3}, or @path.
        #[arg(long)]
        spec: String,
        #[arg(long, value_enum)]
        mode: Class,
        /// Build a concrete failing input tuple for inadmissible transforms.
        #[arg(long)]
        refute: bool,
        /// Number of random input tuples to push through the transform.
        #[arg(long)]
        empirical: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args)]
struct OutputArg {
    /// Write the matrix here instead of stdout (CSV when the extension is .csv).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BudgetArgs {
    /// Maximum number of trials per search.
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    /// Grid sizes as min,max.
    #[arg(long, value_parser = parse_usize_pair, default_value = "2,5")]
    grid: (usize, usize),
    /// Point sampling interval as lo,hi.
    #[arg(long, value_parser = parse_pair, default_value = "0,20")]
    points: (f64, f64),
}

impl BudgetArgs {
    fn budget(&self, seed: u64) -> SearchBudget {
        SearchBudget {
            max_trials: self.budget,
            grid_size_range: self.grid,
            point_range: self.points,
            seed,
        }
    }
}

fn parse_pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

fn parse_usize_pair(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected min,max")?;
    let p = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((p(a)?, p(b)?))
}

/// Inline JSON, or the contents of a file when prefixed with `@`.
fn json_arg<T: serde::de::DeserializeOwned>(raw: &str, what: &str) -> Result<T> {
    let text = match raw.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).with_context(|| format!("reading {what} from {path}"))?,
        None => raw.to_string(),
    };
    serde_json::from_str(&text).with_context(|| format!("parsing {what}"))
}

fn read_input(path: &Path) -> Result<Matrix> {
    let (text, csv) = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        let csv = !s.trim_start().starts_with('{');
        (s, csv)
    } else {
        let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        (s, csv)
    };
    let m = if csv { matrix_from_csv(text.as_bytes()) } else { matrix_from_json(&text) };
    m.with_context(|| format!("parsing matrix {}", path.display()))
}

fn parse_points(s: &str) -> Result<OrderedPoints> {
    let v = s
        .split(',')
        .map(|t| parse_rational(t.trim()).map_err(|e| anyhow!("point {t:?}: {e}")))
        .collect::<Result<Vec<_>>>()?;
    Ok(OrderedPoints::exact(v)?)
}

fn seed_or_random(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(rand::random);
    eprintln!("seed: {seed}");
    seed
}

fn emit_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
}

fn matrix_rows(m: &Matrix) -> String {
    (0..m.rows())
        .map(|i| {
            m.row_scalars(i)
                .iter()
                .map(|s| format!("{:>12}", s.to_string()))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Writes a matrix to `--output` or stdout. `extra` fields ride along in
/// JSON and are ignored when the file is read back.
fn emit_matrix(m: &Matrix, out: &OutputArg, format: Format, extra: Value) -> Result<()> {
    let mut v = serde_json::to_value(m)?;
    if let (Value::Object(map), Value::Object(more)) = (&mut v, extra) {
        map.extend(more);
    }
    match &out.output {
        Some(path) => {
            let text = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
                matrix_to_csv(m)?
            } else {
                serde_json::to_string_pretty(&v)?
            };
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
        None if format == Format::Table => println!("{}", matrix_rows(m)),
        None => emit_json(&v),
    }
    Ok(())
}

fn order_table(mode: &str, r: &OrderReport) {
    println!("mode      {mode}");
    println!("order     {}", r.order);
    println!("full      {}", r.full);
    println!("checked   up to {}", r.checked_up_to);
    if let Some(w) = &r.witness {
        println!("witness   rows {:?} cols {:?} det {}", w.selector.rows, w.selector.cols, w.det);
    }
}

fn verify_table(r: &VerificationReport) {
    println!("{:<4} {:<17} {:>10}  observed", "id", "status", "ms");
    for e in &r.entries {
        let status = serde_json::to_value(e.status).expect("status serializes");
        println!(
            "{:<4} {:<17} {:>10.1}  {}",
            e.id,
            status.as_str().unwrap_or_default(),
            e.runtime_ms,
            e.observed
        );
    }
    println!(
        "seed {}: {} reproduced, {} violated, {} exhausted",
        r.seed,
        r.count(EntryStatus::Reproduced),
        r.count(EntryStatus::Violated),
        r.count(EntryStatus::SearchExhausted)
    );
}

fn run(cli: Cli) -> Result<ExitCode> {
    let format = cli.format;
    match cli.command {
        Command::Check {
            input,
            mode,
            kmax,
            exact,
            tol,
            absolute,
        } => {
            let mut m = read_input(&input)?;
            if exact {
                m = m.to_exact()?;
            }
            let tol = match tol {
                Some(eps) => Tolerance::new(eps, !absolute)?,
                None => Tolerance::default(),
            };
            let (name, report) = match mode {
                OrderMode::Tn => ("tn", totpos::tn_order(&m, kmax, &tol)?),
                OrderMode::Tp => ("tp", totpos::tp_order(&m, kmax, &tol)?),
            };
            if format == Format::Table {
                order_table(name, &report);
            } else {
                let mut v = serde_json::to_value(&report)?;
                v["mode"] = json!(name);
                v["exact"] = json!(m.is_exact());
                emit_json(&v);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Apply { transform, inputs, out } => {
            let f: MixedPowerTransform = json_arg(&transform, "transform")?;
            let ms = inputs.iter().map(|p| read_input(p)).collect::<Result<Vec<_>>>()?;
            let refs: Vec<&Matrix> = ms.iter().collect();
            emit_matrix(&apply(&f, &refs)?, &out, format, json!({}))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Complete { input } => {
            let r = stn_complete(&read_input(&input)?)?;
            if format == Format::Table {
                println!("star {} placement {:?} transposed {}", r.star, r.placement, r.transposed);
                println!("{}", matrix_rows(&r.output));
            } else {
                emit_json(&serde_json::to_value(&r)?);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            n,
            class,
            seed,
            range,
            zero_prob,
            out,
        } => {
            let seed = seed_or_random(seed);
            let mode = Mode::from(class);
            let m = Generator::new(seed)
                .with_range(range.0, range.1)?
                .with_zero_prob(zero_prob)?
                .matrix(n, mode)?;
            emit_matrix(&m, &out, format, json!({ "seed": seed, "class": mode }))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, seed, budget } => {
            let seed = seed_or_random(seed);
            let ids: Vec<String> = suite.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            let report = run_catalog(&ids, &budget.budget(seed))?;
            if format == Format::Table {
                verify_table(&report);
            } else {
                emit_json(&serde_json::to_value(&report)?);
            }
            Ok(if report.all_reproduced() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Search { family, seed, budget } => {
            let family: Family = json_arg(&family, "family")?;
            let seed = seed_or_random(seed);
            let outcome = search_counterexample(&family, &budget.budget(seed))?;
            if format == Format::Table {
                match &outcome {
                    SearchOutcome::Found(w) => {
                        println!("witness at trial {} (seed {})", w.trial, w.seed);
                        println!("minor rows {:?} cols {:?}", w.selector.rows, w.selector.cols);
                        println!("det {:.6e}, margin {:.3e}", w.certificate.det, w.certificate.margin);
                        println!("{}", matrix_rows(&w.matrix));
                    }
                    SearchOutcome::SearchExhausted { trials } => println!("search exhausted after {trials} trials"),
                }
            } else {
                emit_json(&serde_json::to_value(&outcome)?);
            }
            Ok(match outcome {
                SearchOutcome::Found(_) => ExitCode::SUCCESS,
                SearchOutcome::SearchExhausted { .. } => ExitCode::from(1),
            })
        }
        Command::Sample { kernel, x, y, out } => {
            let spec: KernelSpec = json_arg(&kernel, "kernel")?;
            let xs = parse_points(&x)?;
            let ys = match y {
                Some(y) => parse_points(&y)?,
                None => xs.clone(),
            };
            emit_matrix(&sample_kernel(&spec, &xs, &ys)?, &out, format, json!({}))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify {
            transform,
            spec,
            mode,
            refute: want_refutation,
            empirical,
            seed,
        } => {
            let f: MixedPowerTransform = json_arg(&transform, "transform")?;
            let spec: OrderSpec = json_arg(&spec, "order spec")?;
            let mode = Mode::from(class_check(mode, &spec)?);
            let verdict = classify(&f, &spec, mode)?;
            let mut consistent = true;
            let mut v = json!({ "verdict": verdict });
            let seed = (want_refutation || empirical.is_some()).then(|| seed_or_random(seed));
            if want_refutation {
                let budget = SearchBudget::with_seed(seed.expect("seed drawn"));
                let r = refute(&f, &spec, mode, &budget)?;
                if verdict.outcome == Outcome::Inadmissible && matches!(r, RefutationOutcome::NotRefuted { .. }) {
                    consistent = false;
                }
                v["refutation"] = serde_json::to_value(&r)?;
            }
            if let Some(trials) = empirical {
                let r = empirical_preservation(&f, &spec, mode, trials, seed.expect("seed drawn"))?;
                if verdict.outcome == Outcome::Admissible && !r.preserved() {
                    consistent = false;
                }
                v["empirical"] = serde_json::to_value(&r)?;
            }
            if format == Format::Table {
                println!("{} {}: {:?} ({})", verdict.rule, verdict.n, verdict.outcome, verdict.reason);
                if let Some(r) = v.get("refutation") {
                    println!("refutation: {}", r["status"].as_str().unwrap_or_default());
                }
                if let Some(r) = v.get("empirical") {
                    println!(
                        "empirical: {} violations, {} inconclusive in {} trials",
                        r["violations"], r["inconclusive"], r["trials"]
                    );
                }
            } else {
                emit_json(&v);
            }
            Ok(if consistent { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn class_check(class: Class, spec: &OrderSpec) -> Result<Class> {
    let symmetric = Mode::from(class).symmetric();
    if symmetric != spec.symmetric {
        bail!("mode and spec disagree on symmetry (set \"symmetric\": {symmetric} in the spec)");
    }
    Ok(class)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = totpos::init_threads_from_env() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
