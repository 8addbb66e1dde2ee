use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;

use qtr::classify::{classify_shape, enumerate_rank, Classification};
use qtr::quad::fundamental_unit;
use qtr::quartic::{conductor, defining_polynomial, to_williams, validate, validate_ell, FieldInput};
use qtr::rank::{character_table, n_shape, rank_closed, rank_unified, CharacterTable, RankResult, Unit};
use qtr::scan::{self, render, render_verify_text, Format, ScanConfig, ScanEntry, ScanRow};

const EXIT_INVALID: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "qtr", version, about = "2-rank of the class group of real cyclic quartic fields Q(sqrt(n eps0 sqrt(l)))")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Prime l = 5 (mod 8)
    #[arg(long, allow_negative_numbers = true)]
    ell: i64,
    #[arg(long, env = "QTR_DEFAULT_FORMAT", default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct FieldArgs {
    #[command(flatten)]
    common: Common,
    /// Squarefree n > 0 prime to l
    #[arg(long, allow_negative_numbers = true)]
    n: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Rank by both routes, with the character table
    Rank(FieldArgs),
    /// One row per valid n in 1..=n-max
    Scan {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_max: u64,
        /// Keep only rows of this rank
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
        /// Also list rejected n with the reason
        #[arg(long)]
        include_skipped: bool,
    },
    /// Run every invariant over 1..=n-max
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        n_max: u64,
        #[arg(long, default_value_t = default_jobs())]
        jobs: usize,
    },
    /// Fundamental unit (u + v sqrt(l)) / 2
    Unit(Common),
    /// Canonical form and conductor 2^e a l
    Conductor(FieldArgs),
    /// Defining polynomial x^4 - n v l x^2 + n^2 l
    Poly(FieldArgs),
    /// Norm-residue symbols of -1, eps, -eps
    Table(FieldArgs),
    /// Rank pattern for n, or all n <= n-max of a given rank
    Classify {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true, required_unless_present = "n_max")]
        n: Option<i64>,
        #[arg(long, requires = "rank", conflicts_with = "n")]
        n_max: Option<u64>,
        #[arg(long)]
        rank: Option<usize>,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Failure that ends the process with a specific code.
struct Exit {
    code: u8,
    message: String,
}

impl From<qtr::Error> for Exit {
    fn from(e: qtr::Error) -> Self {
        Exit { code: EXIT_INVALID, message: e.to_string() }
    }
}

type Outcome = std::result::Result<String, Exit>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Rank(a) => cmd_rank(&a),
        Command::Scan { common, n_max, rank, jobs, include_skipped } => {
            let cfg = ScanConfig { ell: common.ell, n_max, rank, include_skipped, jobs };
            cmd_scan(&cfg, common.format)
        }
        Command::Verify { common, n_max, jobs } => cmd_verify(common.ell, n_max, jobs, common.format),
        Command::Unit(c) => cmd_unit(&c),
        Command::Conductor(a) => cmd_conductor(&a),
        Command::Poly(a) => cmd_poly(&a),
        Command::Table(a) => cmd_table(&a),
        Command::Classify { common, n, n_max, rank } => cmd_classify(&common, n, n_max, rank),
    };
    match outcome {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not an error worth reporting
            let _ = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush());
            ExitCode::SUCCESS
        }
        Err(Exit { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

/// Scalar output value; integers stay unquoted in JSON.
enum Cell {
    Int(String),
    Str(String),
    Bool(bool),
}

impl Cell {
    fn int(x: impl ToString) -> Cell {
        Cell::Int(x.to_string())
    }

    fn plain(&self) -> &str {
        match self {
            Cell::Int(s) | Cell::Str(s) => s,
            Cell::Bool(true) => "true",
            Cell::Bool(false) => "false",
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(s) => s.clone(),
            Cell::Str(s) => serde_json::to_string(s).expect("string"),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

fn render_record(fields: &[(&str, Cell)], format: Format) -> String {
    match format {
        Format::Text => {
            let width = fields.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            fields.iter().map(|(k, v)| format!("{k:<width$}  {}\n", v.plain())).collect()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(fields.iter().map(|(k, _)| *k)).expect("write to memory");
            w.write_record(fields.iter().map(|(_, v)| v.plain())).expect("write to memory");
            String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf8")
        }
        Format::Json => {
            let body: Vec<String> =
                fields.iter().map(|(k, v)| format!("  {}: {}", serde_json::to_string(k).expect("key"), v.json())).collect();
            format!("{{\n{}\n}}\n", body.join(",\n"))
        }
    }
}

#[derive(Serialize)]
struct TableRow<'a> {
    unit: Unit,
    symbols: &'a [i8],
}

#[derive(Serialize)]
struct TableJson<'a> {
    columns: &'a [qtr::rank::Column],
    rows: Vec<TableRow<'a>>,
}

fn table_json(table: &CharacterTable) -> TableJson<'_> {
    let rows = Unit::ALL.iter().map(|&unit| TableRow { unit, symbols: table.row(unit) }).collect();
    TableJson { columns: &table.columns, rows }
}

#[derive(Serialize)]
struct RankReport<'a> {
    ell: u64,
    n: u64,
    shape: String,
    rank: usize,
    closed: &'a RankResult,
    unified: &'a RankResult,
    table: TableJson<'a>,
}

fn table_csv(table: &CharacterTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> =
        std::iter::once("unit".to_string()).chain(table.columns.iter().map(|c| c.to_string())).collect();
    w.write_record(&header).expect("write to memory");
    for u in Unit::ALL {
        let row: Vec<String> =
            std::iter::once(u.to_string()).chain(table.row(u).iter().map(|x| x.to_string())).collect();
        w.write_record(&row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf8")
}

fn same_route_values(a: &RankResult, b: &RankResult) -> bool {
    (a.mu, a.r_star, a.rank) == (b.mu, b.r_star, b.rank) && a.is_consistent() && b.is_consistent()
}

fn cmd_rank(a: &FieldArgs) -> Outcome {
    let input = validate(a.common.ell, a.n)?;
    let shape = n_shape(&input);
    let closed = rank_closed(&input);
    let unified = rank_unified(&input);
    let table = character_table(&shape, input.ell());
    let out = match a.common.format {
        Format::Text => {
            let line = |route: String, r: &RankResult| {
                format!("{route:<27} mu = {}, r* = {}, rank = {}\n", r.mu, r.r_star, r.rank)
            };
            format!(
                "ell = {}, n = {}, shape {}\n{}{}\n{}",
                input.ell(),
                input.n(),
                shape,
                line(format!("closed ({})", closed.case_tag), &closed),
                line("unified (character table)".into(), &unified),
                table.render()
            )
        }
        Format::Json => {
            let report = RankReport {
                ell: input.ell(),
                n: input.n(),
                shape: shape.to_string(),
                rank: closed.rank,
                closed: &closed,
                unified: &unified,
                table: table_json(&table),
            };
            serde_json::to_string_pretty(&report).expect("plain data") + "\n"
        }
        Format::Csv => scan::render_csv(&[ScanEntry::Row(ScanRow::for_input(&input))], false),
    };
    if !same_route_values(&closed, &unified) {
        return Err(Exit {
            code: EXIT_INTERNAL,
            message: format!(
                "routes disagree for ell = {}, n = {}: closed {:?}, unified {:?}",
                input.ell(),
                input.n(),
                closed,
                unified
            ),
        });
    }
    Ok(out)
}

fn cmd_scan(cfg: &ScanConfig, format: Format) -> Outcome {
    let out = scan::scan(cfg)?;
    Ok(render(&out.entries, format, cfg.include_skipped))
}

fn cmd_verify(ell: i64, n_max: u64, jobs: usize, format: Format) -> Outcome {
    let report = scan::verify(ell, n_max, jobs)?;
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&report).expect("plain data") + "\n",
        Format::Text => render_verify_text(&report),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["ell", "n", "check"]).expect("write to memory");
            for f in &report.failures {
                w.serialize(f).expect("write to memory");
            }
            String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf8")
        }
    };
    if report.passed() {
        Ok(text)
    } else {
        print!("{text}");
        Err(Exit { code: EXIT_INTERNAL, message: format!("{} invariant failures", report.failures.len()) })
    }
}

fn cmd_unit(c: &Common) -> Outcome {
    let ell = validate_ell(c.ell)?;
    let e = fundamental_unit(ell);
    let norm = e.norm_times_four(ell);
    if norm != BigInt::from(-4) {
        return Err(Exit { code: EXIT_INTERNAL, message: format!("unit for ell = {ell} has u^2 - ell v^2 = {norm}") });
    }
    let fields = [
        ("ell", Cell::int(ell)),
        ("u", Cell::int(&e.u)),
        ("v", Cell::int(&e.v)),
        ("u^2 - ell v^2", Cell::int(&norm)),
        ("eps0", Cell::Str(format!("({} + {} sqrt({ell}))/2", e.u, e.v))),
    ];
    Ok(render_record(&fields, c.format))
}

fn cmd_conductor(a: &FieldArgs) -> Outcome {
    let input = validate(a.common.ell, a.n)?;
    let w = to_williams(&input);
    let c = conductor(&w, input.ell());
    let fields = [
        ("ell", Cell::int(input.ell())),
        ("n", Cell::int(input.n())),
        ("a", Cell::int(w.a)),
        ("b", Cell::int(w.b)),
        ("c", Cell::int(w.c)),
        ("e", Cell::int(c.e)),
        ("f", Cell::int(&c.f)),
    ];
    Ok(render_record(&fields, a.common.format))
}

fn cmd_poly(a: &FieldArgs) -> Outcome {
    let input = validate(a.common.ell, a.n)?;
    let p = defining_polynomial(&input);
    let root = p.certificate_root();
    let display = format!("x^4 - {} x^2 + {}", -&p.c2, p.c0);
    let fields = [
        ("ell", Cell::int(input.ell())),
        ("n", Cell::int(input.n())),
        ("polynomial", Cell::Str(display)),
        ("c2", Cell::int(&p.c2)),
        ("c0", Cell::int(&p.c0)),
        ("eisenstein_at_ell", Cell::Bool(p.is_eisenstein_at(input.ell()))),
        ("cyclicity_root", root.as_ref().map_or(Cell::Str("none".into()), Cell::int)),
    ];
    if root.is_none() {
        return Err(Exit { code: EXIT_INTERNAL, message: "cyclicity certificate is not a square".into() });
    }
    Ok(render_record(&fields, a.common.format))
}

fn cmd_table(a: &FieldArgs) -> Outcome {
    let input = validate(a.common.ell, a.n)?;
    let table = character_table(&n_shape(&input), input.ell());
    Ok(match a.common.format {
        Format::Text => table.render(),
        Format::Json => serde_json::to_string_pretty(&table_json(&table)).expect("plain data") + "\n",
        Format::Csv => table_csv(&table),
    })
}

fn classify_one(input: &FieldInput, format: Format) -> String {
    let shape = n_shape(input);
    let c = classify_shape(&shape);
    let (rank, pattern, description) = match c {
        Classification::SmallRank { rank, pattern } => {
            (Cell::int(rank), Cell::Str(pattern.id.to_string()), Cell::Str(pattern.description.into()))
        }
        Classification::AtLeast4 => (Cell::Str(">=4".into()), Cell::Str(String::new()), Cell::Str(String::new())),
    };
    let fields = [
        ("ell", Cell::int(input.ell())),
        ("n", Cell::int(input.n())),
        ("shape", Cell::Str(shape.to_string())),
        ("rank", rank),
        ("pattern", pattern),
        ("description", description),
    ];
    render_record(&fields, format)
}

fn cmd_classify(c: &Common, n: Option<i64>, n_max: Option<u64>, rank: Option<usize>) -> Outcome {
    if let Some(n) = n {
        return Ok(classify_one(&validate(c.ell, n)?, c.format));
    }
    let (n_max, rank) = (n_max.unwrap_or(0), rank.unwrap_or(0));
    let ns = enumerate_rank(c.ell, n_max, rank)?;
    Ok(match c.format {
        Format::Text => ns.iter().map(|n| format!("{n}\n")).collect(),
        Format::Csv => std::iter::once("n\n".to_string()).chain(ns.iter().map(|n| format!("{n}\n"))).collect(),
        Format::Json => serde_json::to_string(&ns).expect("plain data") + "\n",
    })
}
