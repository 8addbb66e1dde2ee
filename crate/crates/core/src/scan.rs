//! Batch evaluation over ranges of `n`, the invariant checker behind
//! `qtr verify`, and the text/CSV/JSON renderers.

use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify::classify_shape;
use crate::error::Result;
use crate::quartic::{conductor, to_williams, validate_ell, validate_n, FieldInput};
use crate::rank::{
    character_table, n_shape, r_star, r_star_shortcut, rank_closed_for_shape, rank_consolidated,
    CaseTag, Unit,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format '{other}' (expected text, csv or json)")),
        }
    }
}

/// One field of a census.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScanRow {
    pub n: u64,
    pub delta: u8,
    pub shape: String,
    pub mu: usize,
    pub r_star: u8,
    pub rank: usize,
    pub case: CaseTag,
    pub conductor: u128,
}

impl ScanRow {
    pub fn for_input(input: &FieldInput) -> ScanRow {
        let shape = n_shape(input);
        let closed = rank_closed_for_shape(&shape);
        let f = conductor(&to_williams(input), input.ell()).f;
        ScanRow {
            n: input.n(),
            delta: shape.delta,
            shape: shape.to_string(),
            mu: closed.mu,
            r_star: closed.r_star,
            rank: closed.rank,
            case: closed.case_tag,
            // a, ell < 2^63 and e <= 3 with a < 2^62 when e = 3
            conductor: u128::try_from(&f).expect("conductor below 2^128 for 63-bit inputs"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScanEntry {
    Row(ScanRow),
    Skipped { n: u64, reason: &'static str },
}

impl ScanEntry {
    pub fn n(&self) -> u64 {
        match self {
            ScanEntry::Row(r) => r.n,
            ScanEntry::Skipped { n, .. } => *n,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub ell: i64,
    pub n_max: u64,
    pub rank: Option<usize>,
    pub include_skipped: bool,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanOutput {
    pub entries: Vec<ScanEntry>,
    pub skipped: usize,
}

fn pool(jobs: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool")
}

fn evaluate(ell: u64, n: u64) -> ScanEntry {
    let Ok(signed) = i64::try_from(n) else {
        return ScanEntry::Skipped { n, reason: "NNotPositive" };
    };
    match validate_n(ell, signed) {
        Ok(input) => ScanEntry::Row(ScanRow::for_input(&input)),
        Err(e) => ScanEntry::Skipped { n, reason: e.kind() },
    }
}

/// Rows for every `1 <= n <= n_max`, ascending. Work is spread over `jobs`
/// threads; the ordered collect makes the result independent of `jobs`.
pub fn scan(cfg: &ScanConfig) -> Result<ScanOutput> {
    let ell = validate_ell(cfg.ell)?;
    let all: Vec<ScanEntry> =
        pool(cfg.jobs).install(|| (1..=cfg.n_max).into_par_iter().map(|n| evaluate(ell, n)).collect());
    let skipped = all.iter().filter(|e| matches!(e, ScanEntry::Skipped { .. })).count();
    let entries = all
        .into_iter()
        .filter(|e| match e {
            ScanEntry::Row(r) => cfg.rank.is_none_or(|k| r.rank == k),
            ScanEntry::Skipped { .. } => cfg.include_skipped && cfg.rank.is_none(),
        })
        .collect();
    Ok(ScanOutput { entries, skipped })
}

pub const CSV_HEADER: [&str; 8] = ["n", "delta", "shape", "mu", "r_star", "rank", "case", "conductor"];

#[derive(Serialize)]
struct CsvRecord<'a> {
    n: u64,
    delta: Option<u8>,
    shape: Option<&'a str>,
    mu: Option<usize>,
    r_star: Option<u8>,
    rank: Option<usize>,
    case: Option<String>,
    conductor: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    skipped: Option<&'a str>,
}

impl<'a> CsvRecord<'a> {
    fn from_entry(e: &'a ScanEntry, with_reason: bool) -> Self {
        match e {
            ScanEntry::Row(r) => CsvRecord {
                n: r.n,
                delta: Some(r.delta),
                shape: Some(&r.shape),
                mu: Some(r.mu),
                r_star: Some(r.r_star),
                rank: Some(r.rank),
                case: Some(r.case.to_string()),
                conductor: Some(r.conductor),
                skipped: with_reason.then_some(""),
            },
            ScanEntry::Skipped { n, reason } => CsvRecord {
                n: *n,
                delta: None,
                shape: None,
                mu: None,
                r_star: None,
                rank: None,
                case: None,
                conductor: None,
                skipped: Some(reason),
            },
        }
    }
}

pub fn render_csv(entries: &[ScanEntry], include_skipped: bool) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    if include_skipped {
        header.push("skipped");
    }
    w.write_record(&header).expect("write to memory");
    for e in entries {
        w.serialize(CsvRecord::from_entry(e, include_skipped)).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf8")
}

pub fn render_json(entries: &[ScanEntry], include_skipped: bool) -> String {
    let records: Vec<CsvRecord> = entries
        .iter()
        .filter(|e| include_skipped || matches!(e, ScanEntry::Row(_)))
        .map(|e| CsvRecord::from_entry(e, false))
        .collect();
    let mut s = serde_json::to_string_pretty(&records).expect("plain data");
    s.push('\n');
    s
}

pub fn render_text(entries: &[ScanEntry]) -> String {
    if entries.is_empty() {
        return String::new();
    }
    let mut lines: Vec<Vec<String>> = vec![CSV_HEADER.iter().map(|s| s.to_string()).collect()];
    for e in entries {
        lines.push(match e {
            ScanEntry::Row(r) => vec![
                r.n.to_string(),
                r.delta.to_string(),
                r.shape.clone(),
                r.mu.to_string(),
                r.r_star.to_string(),
                r.rank.to_string(),
                r.case.to_string(),
                r.conductor.to_string(),
            ],
            ScanEntry::Skipped { n, reason } => vec![n.to_string(), format!("skipped: {reason}")],
        });
    }
    let widths: Vec<usize> = (0..CSV_HEADER.len())
        .map(|j| lines.iter().filter(|l| l.len() == CSV_HEADER.len()).filter_map(|l| l.get(j)).map(|c| c.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for l in &lines {
        let cells: Vec<String> = l
            .iter()
            .enumerate()
            .map(|(j, c)| if l.len() == CSV_HEADER.len() { format!("{c:<w$}", w = widths[j]) } else { c.clone() })
            .collect();
        let _ = writeln!(out, "{}", cells.join("  ").trim_end());
    }
    out
}

pub fn render(entries: &[ScanEntry], format: Format, include_skipped: bool) -> String {
    match format {
        Format::Text => render_text(entries),
        Format::Csv => render_csv(entries, include_skipped),
        Format::Json => render_json(entries, include_skipped),
    }
}

/// Invariant checks run per field by `verify`.
pub const CHECKS: [&str; 6] = [
    "cross-path",
    "product-formula",
    "conductor-bridge",
    "classify-agreement",
    "r-star-shortcut",
    "consolidated-formula",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyFailure {
    pub ell: u64,
    pub n: u64,
    pub check: &'static str,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub ell: u64,
    pub n_max: u64,
    pub fields_checked: usize,
    pub skipped: usize,
    pub failures: Vec<VerifyFailure>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failures_for(&self, check: &str) -> usize {
        self.failures.iter().filter(|f| f.check == check).count()
    }
}

/// Names of the checks that fail for one field.
pub fn check_field(input: &FieldInput) -> Vec<&'static str> {
    let mut failed = Vec::new();
    let shape = n_shape(input);
    let closed = rank_closed_for_shape(&shape);
    let table = character_table(&shape, input.ell());
    let rs = r_star(&table);
    let mu = table.columns.len();
    let unified_rank = (mu + rs as usize).checked_sub(3);
    if !closed.is_consistent()
        || unified_rank != Some(closed.rank)
        || closed.mu != mu
        || closed.r_star != rs
    {
        failed.push("cross-path");
    }
    if !table.satisfies_product_formula() || !table.rows_multiplicative() || table.row(Unit::Eps)[0] != -1 {
        failed.push("product-formula");
    }
    let e = conductor(&to_williams(input), input.ell()).e;
    if (e != 0) != shape.ram2() {
        failed.push("conductor-bridge");
    }
    let agrees = match classify_shape(&shape).rank() {
        Some(r) => r as usize == closed.rank,
        None => closed.rank >= 4,
    };
    if !agrees {
        failed.push("classify-agreement");
    }
    if rs != r_star_shortcut(&shape) {
        failed.push("r-star-shortcut");
    }
    if rank_consolidated(&shape) != closed.rank {
        failed.push("consolidated-formula");
    }
    failed
}

pub fn verify(ell: i64, n_max: u64, jobs: usize) -> Result<VerifyReport> {
    let ell = validate_ell(ell)?;
    let per_n: Vec<Option<Vec<&'static str>>> = pool(jobs).install(|| {
        (1..=n_max)
            .into_par_iter()
            .map(|n| {
                let input = validate_n(ell, i64::try_from(n).ok()?).ok()?;
                Some(check_field(&input))
            })
            .collect()
    });
    let mut report = VerifyReport { ell, n_max, fields_checked: 0, skipped: 0, failures: Vec::new() };
    for (n, res) in (1..=n_max).zip(per_n) {
        match res {
            None => report.skipped += 1,
            Some(failed) => {
                report.fields_checked += 1;
                report.failures.extend(failed.into_iter().map(|check| VerifyFailure { ell, n, check }));
            }
        }
    }
    Ok(report)
}

pub fn render_verify_text(report: &VerifyReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "ell = {}, n <= {}: {} fields checked, {} n skipped",
        report.ell, report.n_max, report.fields_checked, report.skipped
    );
    for check in CHECKS {
        let bad = report.failures_for(check);
        let status = if bad == 0 { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "  {status}  {check:<22} {} ok, {} failed", report.fields_checked - bad.min(report.fields_checked), bad);
    }
    for f in &report.failures {
        let _ = writeln!(out, "  failure: ell = {}, n = {}, check {}", f.ell, f.n, f.check);
    }
    let _ = writeln!(out, "{}", if report.passed() { "all checks pass" } else { "FAILURES" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Error;

    fn cfg(ell: i64, n_max: u64, jobs: usize) -> ScanConfig {
        ScanConfig { ell, n_max, rank: None, include_skipped: false, jobs }
    }

    #[test]
    fn scan_small() {
        let out = scan(&cfg(13, 2, 1)).unwrap();
        let ranks: Vec<(u64, usize)> = out
            .entries
            .iter()
            .map(|e| match e {
                ScanEntry::Row(r) => (r.n, r.rank),
                _ => panic!(),
            })
            .collect();
        assert_eq!(ranks, vec![(1, 0), (2, 0)]);
    }

    #[test]
    fn scan_rank_filter() {
        let out = scan(&ScanConfig { rank: Some(0), ..cfg(5, 10, 2) }).unwrap();
        let ns: Vec<u64> = out.entries.iter().map(|e| e.n()).collect();
        for n in [1, 2, 3, 7] {
            assert!(ns.contains(&n), "{n} missing from {ns:?}");
        }
        assert!(!ns.contains(&5));
    }

    #[test]
    fn scan_empty_and_bad_ell() {
        let out = scan(&cfg(37, 0, 1)).unwrap();
        assert!(out.entries.is_empty());
        assert_eq!(render_text(&out.entries), "");
        assert_eq!(scan(&cfg(12, 10, 1)), Err(Error::EllNotPrime(12)));
    }

    #[test]
    fn skipped_rows() {
        let out = scan(&ScanConfig { include_skipped: true, ..cfg(5, 10, 1) }).unwrap();
        assert_eq!(out.entries.len(), 10);
        assert_eq!(out.skipped, 5); // 4, 5, 8, 9, 10
        let csv = render_csv(&out.entries, true);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,delta,shape,mu,r_star,rank,case,conductor,skipped");
        assert_eq!(lines[4], "4,,,,,,,,NotSquarefree");
        assert_eq!(lines[5], "5,,,,,,,,NotCoprime");
        let json: serde_json::Value = serde_json::from_str(&render_json(&out.entries, true)).unwrap();
        assert_eq!(json[3]["skipped"], "NotSquarefree");
        assert!(json[0]["skipped"].is_null());
    }

    #[test]
    fn csv_quotes_shape() {
        let out = scan(&cfg(5, 3293, 4)).unwrap();
        let csv = render_csv(&out.entries, false);
        assert!(csv.starts_with("n,delta,shape,mu,r_star,rank,case,conductor\n"));
        let line = csv.lines().find(|l| l.starts_with("3293,")).unwrap();
        assert_eq!(line, "3293,1,\"p·p [I,S]\",5,1,3,p-only:mixed,65860");
    }

    #[test]
    fn json_integers_unquoted() {
        let out = scan(&cfg(37, 13, 1)).unwrap();
        let s = render_json(&out.entries, false);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        let last = v.as_array().unwrap().last().unwrap();
        assert_eq!(last["n"], 13);
        assert_eq!(last["rank"], 1);
        assert_eq!(last["conductor"], 1924);
        assert_eq!(last["case"], "p-only:inert");
        let keys: Vec<&String> = last.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), 8);
    }

    #[test]
    fn verify_reports() {
        let r = verify(5, 1, 1).unwrap();
        assert_eq!((r.fields_checked, r.passed()), (1, true));
        assert!(verify(12, 10, 1).is_err());
        let r = verify(37, 500, 3).unwrap();
        assert!(r.passed(), "{}", render_verify_text(&r));
    }
}
