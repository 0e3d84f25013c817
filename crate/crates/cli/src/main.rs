//! `macc`: build, check and simulate multi-access coded caching schemes.

use std::fs;
use std::io::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use macc_core::compare::{self, SweepRanges};
use macc_core::construct::{self, BuildOptions, ConstructionId, Scheme};
use macc_core::delivery::{self, DecodeReport, NumericReport, TransmissionPlan};
use macc_core::format::{self, Document};
use macc_core::verify;
use macc_core::{CachingArray, DeliveryArray, DemandVector, Entry, Error, NetworkParams, Violation};

#[derive(Parser)]
#[command(name = "macc", version, about = "Multi-access coded caching array toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a caching/delivery array pair and write it as a document.
    Construct(ConstructArgs),
    /// Check every condition of an array document; exits 1 on violations.
    Verify(VerifyArgs),
    /// Schedule transmissions, check decodability and run the numeric model.
    Simulate(SimulateArgs),
    /// Closed-form delivery time and subpacketization of every scheme.
    Compare(CompareArgs),
    /// Re-render an array document.
    Export(ExportArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Doc,
    Csv,
}

#[derive(Args, Clone)]
struct SchemeArgs {
    /// 1 = general, 2 = K = rt+L, 3 = K = m*rt+(m-1)L, 4 = EPDA lift, auto = best.
    #[arg(long, default_value = "auto")]
    construction: String,
    #[arg(long = "K")]
    k: usize,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    t: usize,
    #[arg(long = "L")]
    l: usize,
    /// Number of files (defaults to K).
    #[arg(long = "N")]
    n: Option<usize>,
    /// Required layer count for construction 3.
    #[arg(long)]
    m: Option<usize>,
    /// Shrink construction 1 by gcd(K, t, L).
    #[arg(long)]
    gcd_reduce: bool,
    /// EPDA document to lift (construction 4).
    #[arg(long)]
    epda: Option<PathBuf>,
    /// Extra antennas beyond those the lifted array needs (construction 4).
    #[arg(long, default_value_t = 0)]
    ell: usize,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    scheme: SchemeArgs,
    #[arg(long, value_enum, default_value = "doc")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Array document.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Delivery document; without it the scheme is built from the flags.
    #[arg(long = "in", conflicts_with_all = ["construction", "k", "r", "t", "l", "m", "gcd_reduce", "epda", "ell"])]
    input: Option<PathBuf>,
    #[arg(long)]
    construction: Option<String>,
    #[arg(long = "K")]
    k: Option<usize>,
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long = "L")]
    l: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    gcd_reduce: bool,
    #[arg(long)]
    epda: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    ell: usize,
    /// `distinct` (d_k = k, needs N >= K) or `uniform:f`.
    #[arg(long, default_value = "distinct")]
    demand: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Single value or inclusive range `a-b`.
    #[arg(long = "K")]
    k: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long = "L")]
    l: Option<String>,
    /// `subpacketization` (K=25, r=3, L=1) or `ndt` (K=30, L=3, r=1..3).
    #[arg(long, conflicts_with_all = ["k", "r", "t", "l"])]
    preset: Option<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn fail(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Construct(a) => run_construct(a),
        Command::Verify(a) => run_verify(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Compare(a) => run_compare(a),
        Command::Export(a) => run_export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| fail(format!("writing {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| fail(format!("writing stdout: {e}")))
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| fail(format!("reading {}: {e}", path.display())))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| fail(e.to_string()))
}

fn build_scheme(a: &SchemeArgs) -> Result<Scheme, Failure> {
    let n = a.n.unwrap_or(a.k);
    let params = NetworkParams::with_files(a.k, a.r, a.t, a.l + a.ell, n)?;
    let epda = match &a.epda {
        Some(path) => Some(construct::lift::load_epda(&read(path)?)?),
        None => None,
    };
    if a.ell > 0 && a.construction != "4" && a.construction != "auto" {
        return Err(fail("--ell only applies to construction 4"));
    }
    if a.ell >= a.r {
        return Err(fail(format!("--ell must be below r = {}", a.r)));
    }
    let options = BuildOptions {
        gcd_reduce: a.gcd_reduce,
        layers: a.m,
        epda,
    };
    let scheme = if a.construction == "auto" && a.epda.is_none() && a.ell == 0 {
        construct::build_auto(&params, &options)?
    } else {
        let id: ConstructionId = match a.construction.as_str() {
            "auto" => ConstructionId::Lift,
            other => other.parse()?,
        };
        construct::build(id, &params, &options)?
    };
    Ok(scheme)
}

fn run_construct(a: ConstructArgs) -> Result<(), Failure> {
    let scheme = build_scheme(&a.scheme)?;
    let text = match a.format {
        Format::Doc => format::serialize_delivery(&scheme.delivery),
        Format::Text => {
            let metrics = scheme.metrics()?;
            let mut s = format!(
                "construction {} ({})\nK={} r={} t={} L={}\nF={} Z={} S={}\nNDT={} bound={} optimal={}\n",
                scheme.construction,
                scheme.variant,
                metrics.k,
                metrics.r,
                metrics.t,
                metrics.l,
                metrics.f,
                metrics.z,
                metrics.s,
                metrics.ndt,
                metrics.optimal_bound,
                metrics.optimal
            );
            for note in &scheme.notes {
                s += &format!("note: {note}\n");
            }
            s += "\ncaching array\n";
            s += &render_caching(scheme.caching());
            s += "\ndelivery array\n";
            s += &render_entries(scheme.delivery.cells(), scheme.delivery.k(), scheme.caching().row_labels());
            s
        }
        Format::Csv => csv_entries(scheme.delivery.cells(), scheme.delivery.k(), scheme.caching().row_labels()),
    };
    emit(a.out.as_deref(), &text)
}

fn violations_of(doc: &Document) -> Result<Vec<Violation>, Failure> {
    Ok(match doc {
        Document::Caching(c) => verify::check_caching_array(c, c.r()),
        Document::Delivery(d) => {
            let mut v = verify::check_caching_array(d.caching(), d.r());
            v.extend(verify::check_delivery_array(d.caching(), d, d.l())?);
            v
        }
        Document::Epda(a) => verify::check_epda(a),
    })
}

fn run_verify(a: VerifyArgs) -> Result<(), Failure> {
    let doc = format::parse_lenient(&read(&a.input)?)?;
    let violations = violations_of(&doc)?;
    let text = match a.format {
        Format::Doc => to_json(&violations)?,
        Format::Csv => {
            let mut s = String::from("condition,location,detail\n");
            for v in &violations {
                s += &format!("{},{},{}\n", v.condition, quote(&v.location.to_string()), quote(&v.detail));
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for v in &violations {
                s += &format!("{v}\n");
            }
            if violations.is_empty() {
                s += &format!("{}: all conditions hold\n", describe(&doc));
            } else {
                s += &format!("{} violation(s)\n", violations.len());
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: String::new(),
        })
    }
}

fn parse_demand(arg: &str, k: usize, n: usize) -> Result<DemandVector, Failure> {
    if arg == "distinct" {
        return Ok(DemandVector::distinct(k, n)?);
    }
    if let Some(file) = arg.strip_prefix("uniform:") {
        let file = file.parse().map_err(|_| fail(format!("bad file index in {arg:?}")))?;
        return Ok(DemandVector::uniform(file, k, n)?);
    }
    Err(fail(format!("--demand must be `distinct` or `uniform:f`, got {arg:?}")))
}

fn run_simulate(a: SimulateArgs) -> Result<(), Failure> {
    let d: DeliveryArray = match &a.input {
        Some(path) => match format::deserialize(&read(path)?)? {
            Document::Delivery(d) => d,
            other => return Err(fail(format!("expected a delivery document, found {}", other.kind()))),
        },
        None => {
            let need = |v: Option<usize>, name: &str| v.ok_or_else(|| fail(format!("--{name} is required without --in")));
            let args = SchemeArgs {
                construction: a.construction.clone().unwrap_or_else(|| "auto".into()),
                k: need(a.k, "K")?,
                r: need(a.r, "r")?,
                t: need(a.t, "t")?,
                l: need(a.l, "L")?,
                n: a.n,
                m: a.m,
                gcd_reduce: a.gcd_reduce,
                epda: a.epda.clone(),
                ell: a.ell,
            };
            build_scheme(&args)?.delivery
        }
    };
    let n = a.n.unwrap_or(d.k());
    let demand = parse_demand(&a.demand, d.k(), n)?;
    let plan = delivery::schedule(&d, &demand)?;
    let report = delivery::symbolic_decode_check(&plan, &d);
    let numeric = delivery::numeric_simulate(&plan, &d, a.seed, a.tolerance)?;
    let text = match a.format {
        Format::Doc | Format::Csv => {
            #[derive(serde::Serialize)]
            struct Out<'a> {
                plan: &'a TransmissionPlan,
                decode: &'a DecodeReport,
                numeric: &'a NumericReport,
            }
            to_json(&Out {
                plan: &plan,
                decode: &report,
                numeric: &numeric,
            })?
        }
        Format::Text => render_simulation(&plan, &report, &numeric, &d),
    };
    emit(a.out.as_deref(), &text)?;
    if report.passed && numeric.passed {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: "simulation failed".into(),
        })
    }
}

fn render_simulation(plan: &TransmissionPlan, report: &DecodeReport, numeric: &NumericReport, d: &DeliveryArray) -> String {
    let mut s = format!(
        "users={} rows={} antennas={} transmissions={}\nNDT={}\n",
        plan.users,
        plan.rows,
        plan.antennas,
        plan.channel_uses(),
        plan.ndt
    );
    for tx in &plan.transmissions {
        let parts: Vec<String> = tx
            .participants
            .iter()
            .map(|p| {
                let nulls: Vec<String> = p.null_set.iter().map(usize::to_string).collect();
                format!("u{}:W{}[{}] null{{{}}}", p.user, p.file, label(d, p.row), nulls.join(","))
            })
            .collect();
        s += &format!("s={}: {}\n", tx.s, parts.join("  "));
    }
    s += &format!(
        "symbolic decode: {} (served per user: {:?}, largest null set {})\n",
        if report.passed { "pass" } else { "FAIL" },
        report.served_per_user,
        report.max_null_set
    );
    for failure in &report.failures {
        s += &format!("  {failure}\n");
    }
    s += &format!(
        "numeric max relative error: {:.3e} (tolerance {:.1e}): {}\n",
        numeric.max_relative_error,
        numeric.tolerance,
        if numeric.passed { "pass" } else { "FAIL" }
    );
    s
}

fn label(d: &DeliveryArray, row: usize) -> String {
    d.caching().row_label(row)
}

fn parse_range(text: Option<&str>, name: &str) -> Result<RangeInclusive<usize>, Failure> {
    let Some(text) = text else {
        return Err(fail(format!("--{name} is required unless --preset is given")));
    };
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| fail(format!("bad --{name} value {text:?}")));
    match text.split_once('-') {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b)?);
            if a > b {
                return Err(fail(format!("empty --{name} range {text:?}")));
            }
            Ok(a..=b)
        }
        None => {
            let v = num(text)?;
            Ok(v..=v)
        }
    }
}

fn run_compare(a: CompareArgs) -> Result<(), Failure> {
    let ranges = match a.preset.as_deref() {
        Some("subpacketization") => compare::subpacketization_preset(),
        Some("ndt") => compare::ndt_preset(),
        Some(other) => return Err(fail(format!("unknown preset {other:?}; use subpacketization or ndt"))),
        None => SweepRanges {
            k: parse_range(a.k.as_deref(), "K")?,
            r: parse_range(a.r.as_deref(), "r")?,
            t: parse_range(a.t.as_deref(), "t")?,
            l: parse_range(a.l.as_deref(), "L")?,
        },
    };
    let single = [&ranges.k, &ranges.r, &ranges.t, &ranges.l].iter().all(|r| r.start() == r.end());
    let text = match a.format {
        Format::Csv => compare::to_csv(&compare::sweep(&ranges))?,
        Format::Doc => to_json(&compare::sweep(&ranges))?,
        Format::Text if single => {
            let params = NetworkParams::new(*ranges.k.start(), *ranges.r.start(), *ranges.t.start(), *ranges.l.start())?;
            compare::catalog_table(&params, &compare::evaluate_catalog(&params))
        }
        Format::Text => {
            let mut s = format!("{:>4} {:>3} {:>3} {:>3} {:<26} {:>10} {:>14}\n", "K", "r", "t", "L", "scheme", "NDT", "F");
            for row in compare::sweep(&ranges) {
                s += &format!(
                    "{:>4} {:>3} {:>3} {:>3} {:<26} {:>10} {:>14}\n",
                    row.k,
                    row.r,
                    row.t,
                    row.l,
                    row.scheme,
                    row.ndt.to_string(),
                    row.f
                );
            }
            s
        }
    };
    emit(a.out.as_deref(), &text)
}

fn run_export(a: ExportArgs) -> Result<(), Failure> {
    let doc = format::deserialize(&read(&a.input)?)?;
    let text = match (a.format, &doc) {
        (Format::Doc, doc) => format::serialize(doc),
        (Format::Text, Document::Caching(c)) => render_caching(c),
        (Format::Text, Document::Delivery(d)) => render_entries(d.cells(), d.k(), d.caching().row_labels()),
        (Format::Text, Document::Epda(e)) => render_entries(e.cells(), e.k(), None),
        (Format::Csv, Document::Caching(c)) => csv_grid(&caching_tokens(c), c.k(), c.row_labels()),
        (Format::Csv, Document::Delivery(d)) => csv_entries(d.cells(), d.k(), d.caching().row_labels()),
        (Format::Csv, Document::Epda(e)) => csv_entries(e.cells(), e.k(), None),
    };
    emit(a.out.as_deref(), &text)
}

fn caching_tokens(c: &CachingArray) -> Vec<String> {
    (1..=c.f())
        .flat_map(|j| (1..=c.k()).map(move |k| if c.is_star(j, k) { "*".to_string() } else { ".".to_string() }))
        .collect()
}

fn render_caching(c: &CachingArray) -> String {
    render_grid(&caching_tokens(c), c.k(), c.row_labels())
}

fn render_entries(cells: &[Entry], k: usize, labels: Option<&[String]>) -> String {
    let tokens: Vec<String> = cells.iter().map(Entry::to_string).collect();
    render_grid(&tokens, k, labels)
}

fn render_grid(tokens: &[String], k: usize, labels: Option<&[String]>) -> String {
    let width = tokens.iter().map(String::len).max().unwrap_or(1);
    let label_width = labels.map_or(0, |l| l.iter().map(String::len).max().unwrap_or(0));
    let mut s = String::new();
    for (idx, row) in tokens.chunks(k).enumerate() {
        if let Some(labels) = labels {
            s += &format!("{:<label_width$}  ", labels[idx]);
        }
        let cells: Vec<String> = row.iter().map(|t| format!("{t:>width$}")).collect();
        s += &cells.join(" ");
        s.push('\n');
    }
    s
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', ' ']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn csv_entries(cells: &[Entry], k: usize, labels: Option<&[String]>) -> String {
    let tokens: Vec<String> = cells.iter().map(Entry::to_string).collect();
    csv_grid(&tokens, k, labels)
}

fn csv_grid(tokens: &[String], k: usize, labels: Option<&[String]>) -> String {
    let mut s = String::from("row");
    for col in 1..=k {
        s += &format!(",{col}");
    }
    s.push('\n');
    for (idx, row) in tokens.chunks(k).enumerate() {
        let name = labels.map_or_else(|| (idx + 1).to_string(), |l| l[idx].clone());
        s += &quote(&name);
        for token in row {
            s += &format!(",{token}");
        }
        s.push('\n');
    }
    s
}

fn describe(doc: &Document) -> String {
    match doc {
        Document::Caching(c) => format!("({},{},{},{}) caching array", c.k(), c.f(), c.z(), c.r()),
        Document::Delivery(d) => format!("(C,{},{}) delivery array on a {} x {} caching array", d.s(), d.l(), d.f(), d.k()),
        Document::Epda(a) => {
            let (k, l, f, z, s) = a.parameters();
            match a.regularity() {
                Some(g) => format!("({k},{l},{f},{z},{s}) EPDA, {g}-regular"),
                None => format!("({k},{l},{f},{z},{s}) EPDA"),
            }
        }
    }
}
