//! 2-rank of the class group of `K` over `k = Q(sqrt(ell))`.
//!
//! Two independent routes are provided:
//!
//! * [`rank_closed`] dispatches on the factorization shape of `n` to one of
//!   six closed-form case theorems and evaluates that theorem's formula.
//! * [`rank_unified`] builds the list of primes of `k` ramified in `K`, the
//!   table of norm-residue characters of the units `-1, eps, -eps` at those
//!   primes, reads off `r*` (the number of independent unit norms) and
//!   applies the ambiguous class number formula `rank = mu + r* - 3`.
//!
//! Both must agree on every valid input.

use std::fmt;

use serde::Serialize;

use crate::ntheory::quartic_symbol;
use crate::quad::{splitting_type, SplittingType};
use crate::quartic::FieldInput;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TaggedPrime {
    pub prime: u64,
    pub splitting: SplittingType,
}

impl TaggedPrime {
    pub fn is_split(&self) -> bool {
        self.splitting == SplittingType::Split
    }
}

/// `n = delta * prod p_i * prod q_j` with `p_i = 1`, `q_j = 3 (mod 4)`, each
/// odd prime tagged by its behaviour in `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NShape {
    pub delta: u8,
    pub plist: Vec<TaggedPrime>,
    pub qlist: Vec<TaggedPrime>,
}

impl NShape {
    pub fn t(&self) -> usize {
        self.plist.len()
    }
    pub fn s(&self) -> usize {
        self.qlist.len()
    }
    pub fn t1(&self) -> usize {
        self.plist.iter().filter(|p| !p.is_split()).count()
    }
    pub fn t2(&self) -> usize {
        self.plist.iter().filter(|p| p.is_split()).count()
    }
    pub fn s1(&self) -> usize {
        self.qlist.iter().filter(|q| !q.is_split()).count()
    }
    pub fn s2(&self) -> usize {
        self.qlist.iter().filter(|q| q.is_split()).count()
    }
    /// Primes of `k` above the `p_i`.
    pub fn h(&self) -> usize {
        self.t1() + 2 * self.t2()
    }
    /// Primes of `k` above the `q_j`.
    pub fn w(&self) -> usize {
        self.s1() + 2 * self.s2()
    }
    /// Whether the prime of `k` above 2 ramifies in `K`.
    pub fn ram2(&self) -> bool {
        !(self.delta == 1 && self.s() % 2 == 1)
    }

    pub fn value(&self) -> u64 {
        self.plist.iter().chain(&self.qlist).map(|p| p.prime).product::<u64>() * self.delta as u64
    }
}

impl fmt::Display for NShape {
    /// e.g. `2·p·p·q [S,I,I]`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut letters: Vec<&str> = Vec::new();
        if self.delta == 2 {
            letters.push("2");
        }
        letters.extend(self.plist.iter().map(|_| "p"));
        letters.extend(self.qlist.iter().map(|_| "q"));
        if letters.is_empty() {
            return f.write_str("1");
        }
        f.write_str(&letters.join("·"))?;
        let tags: Vec<String> =
            self.plist.iter().chain(&self.qlist).map(|p| p.splitting.letter().to_string()).collect();
        if !tags.is_empty() {
            write!(f, " [{}]", tags.join(","))?;
        }
        Ok(())
    }
}

pub fn n_shape(input: &FieldInput) -> NShape {
    let ell = input.ell();
    let mut shape = NShape { delta: 1, plist: Vec::new(), qlist: Vec::new() };
    for &r in input.primes() {
        if r == 2 {
            shape.delta = 2;
            continue;
        }
        let tagged = TaggedPrime { prime: r, splitting: splitting_type(r, ell) };
        if r % 4 == 1 {
            shape.plist.push(tagged);
        } else {
            shape.qlist.push(tagged);
        }
    }
    shape
}

/// A prime of `k` ramified in `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    SqrtEll,
    Dyadic,
    InertP(u64),
    /// One of the two primes above a split `p`; `conjugate` marks the second.
    SplitP { prime: u64, conjugate: bool },
    InertQ(u64),
    SplitQ { prime: u64, conjugate: bool },
}

impl Column {
    fn odd_prime(&self) -> Option<u64> {
        match *self {
            Column::InertP(p) | Column::InertQ(p) => Some(p),
            Column::SplitP { prime, .. } | Column::SplitQ { prime, .. } => Some(prime),
            Column::SqrtEll | Column::Dyadic => None,
        }
    }
}

impl fmt::Display for Column {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Column::SqrtEll => f.write_str("sqrt(l)"),
            Column::Dyadic => f.write_str("(2)"),
            Column::InertP(p) | Column::InertQ(p) => write!(f, "({p})"),
            Column::SplitP { prime, conjugate } | Column::SplitQ { prime, conjugate } => {
                write!(f, "{prime}{}", if conjugate { "'" } else { "" })
            }
        }
    }
}

impl Serialize for Column {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamProfile {
    pub columns: Vec<Column>,
    pub mu: usize,
    pub h: usize,
    pub w: usize,
    pub ram2: bool,
}

/// Column order: `sqrt(ell)`, odd primes ascending (split pairs adjacent,
/// unbarred first), then the dyadic prime.
pub fn ram_profile(shape: &NShape) -> RamProfile {
    let mut columns = vec![Column::SqrtEll];
    let mut odd: Vec<Column> = Vec::new();
    for p in &shape.plist {
        if p.is_split() {
            odd.push(Column::SplitP { prime: p.prime, conjugate: false });
            odd.push(Column::SplitP { prime: p.prime, conjugate: true });
        } else {
            odd.push(Column::InertP(p.prime));
        }
    }
    for q in &shape.qlist {
        if q.is_split() {
            odd.push(Column::SplitQ { prime: q.prime, conjugate: false });
            odd.push(Column::SplitQ { prime: q.prime, conjugate: true });
        } else {
            odd.push(Column::InertQ(q.prime));
        }
    }
    // stable, so conjugate pairs keep their order
    odd.sort_by_key(|c| c.odd_prime());
    columns.extend(odd);
    let ram2 = shape.ram2();
    if ram2 {
        columns.push(Column::Dyadic);
    }
    RamProfile { mu: columns.len(), h: shape.h(), w: shape.w(), ram2, columns }
}

/// The three unit classes of `k` modulo squares other than 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Unit {
    #[serde(rename = "-1")]
    MinusOne,
    #[serde(rename = "eps")]
    Eps,
    #[serde(rename = "-eps")]
    MinusEps,
}

impl Unit {
    pub const ALL: [Unit; 3] = [Unit::MinusOne, Unit::Eps, Unit::MinusEps];

    /// Coordinates over F2 in the basis `(-1, eps)`.
    fn bits(self) -> u8 {
        match self {
            Unit::MinusOne => 0b01,
            Unit::Eps => 0b10,
            Unit::MinusEps => 0b11,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Unit::MinusOne => "-1",
            Unit::Eps => "eps",
            Unit::MinusEps => "-eps",
        })
    }
}

/// Norm-residue symbols `(unit, d)_P` for every ramified prime `P`; entries
/// are `+1` or `-1`. Rows follow [`Unit::ALL`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CharacterTable {
    pub columns: Vec<Column>,
    pub rows: [Vec<i8>; 3],
}

impl CharacterTable {
    pub fn row(&self, unit: Unit) -> &[i8] {
        &self.rows[unit as usize]
    }

    pub fn row_product(&self, unit: Unit) -> i8 {
        self.row(unit).iter().product()
    }

    pub fn is_norm(&self, unit: Unit) -> bool {
        self.row(unit).iter().all(|&x| x == 1)
    }

    /// Every row multiplies to `+1`.
    pub fn satisfies_product_formula(&self) -> bool {
        Unit::ALL.iter().all(|&u| self.row_product(u) == 1)
    }

    /// Row of `-eps` is the entrywise product of the rows of `-1` and `eps`.
    pub fn rows_multiplicative(&self) -> bool {
        self.row(Unit::MinusOne)
            .iter()
            .zip(self.row(Unit::Eps))
            .zip(self.row(Unit::MinusEps))
            .all(|((a, b), c)| a * b == *c)
    }

    /// Aligned plain-text rendering.
    pub fn render(&self) -> String {
        let mut header: Vec<String> = vec!["unit".into()];
        header.extend(self.columns.iter().map(|c| c.to_string()));
        let mut lines: Vec<Vec<String>> = vec![header];
        for u in Unit::ALL {
            let mut line = vec![u.to_string()];
            line.extend(self.row(u).iter().map(|&x| if x > 0 { "+".into() } else { "-".into() }));
            lines.push(line);
        }
        let ncol = lines[0].len();
        let widths: Vec<usize> =
            (0..ncol).map(|j| lines.iter().map(|l| l[j].chars().count()).max().unwrap_or(0)).collect();
        let mut out = String::new();
        for l in &lines {
            let cells: Vec<String> = l
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}", w = w))
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// `(r/ell)_4 (ell/r)_4` for a prime `r` split in `k`.
pub fn split_prime_symbol(r: u64, ell: u64) -> i8 {
    let a = quartic_symbol(r as i64, ell).expect("split prime is a square mod ell");
    let b = quartic_symbol(ell as i64, r).expect("ell is a square mod a split prime");
    a * b
}

pub fn character_table(shape: &NShape, ell: u64) -> CharacterTable {
    let profile = ram_profile(shape);
    let dyadic_eps: i8 = if shape.s() % 2 == 0 { -1 } else { 1 };
    let mut rows: [Vec<i8>; 3] = Default::default();
    for col in &profile.columns {
        let (m1, eps) = match *col {
            Column::SqrtEll => (1, -1),
            Column::Dyadic => (1, dyadic_eps),
            Column::InertP(_) => (1, 1),
            Column::SplitP { prime, .. } => (1, split_prime_symbol(prime, ell)),
            Column::InertQ(_) => (1, -1),
            Column::SplitQ { prime, conjugate } => {
                let tau = split_prime_symbol(prime, ell);
                (-1, if conjugate { -tau } else { tau })
            }
        };
        rows[0].push(m1);
        rows[1].push(eps);
        rows[2].push(m1 * eps);
    }
    CharacterTable { columns: profile.columns, rows }
}

/// `r*` = dimension over F2 of the subgroup of `E_k / E_k^2` spanned by the
/// units whose row is all `+1`.
pub fn r_star(table: &CharacterTable) -> u8 {
    let norms: Vec<u8> = Unit::ALL.iter().filter(|&&u| table.is_norm(u)).map(|u| u.bits()).collect();
    let mut span = vec![0u8];
    for v in norms {
        if !span.contains(&v) {
            let extended: Vec<u8> = span.iter().map(|x| x ^ v).collect();
            span.extend(extended);
        }
    }
    span.len().trailing_zeros() as u8
}

/// `r*` straight from the shape: `-1` is a norm iff no `q = 3 (mod 4)`
/// splits, and `eps`, `-eps` never are.
pub fn r_star_shortcut(shape: &NShape) -> u8 {
    u8::from(shape.s2() == 0)
}

/// Which split/inert pattern a group of primes follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subcase {
    AllInert,
    AllSplit,
    Mixed,
}

impl Subcase {
    fn of(primes: &[TaggedPrime]) -> Subcase {
        let split = primes.iter().filter(|p| p.is_split()).count();
        if split == 0 {
            Subcase::AllInert
        } else if split == primes.len() {
            Subcase::AllSplit
        } else {
            Subcase::Mixed
        }
    }

    fn label(self) -> &'static str {
        match self {
            Subcase::AllInert => "inert",
            Subcase::AllSplit => "split",
            Subcase::Mixed => "mixed",
        }
    }
}

/// The case theorem (and subcase) that produced a rank. `Unified` marks the
/// character-table route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CaseTag {
    /// Only primes `= 1 (mod 4)`, at least one; subcase by those primes.
    OnlyP(Subcase),
    /// `n = 1` or `2`.
    Trivial,
    /// `n` odd, only primes `= 3 (mod 4)`, odd count.
    OddQ(Subcase),
    /// Only primes `= 3 (mod 4)`, even count or `n` even.
    EvenQ(Subcase),
    /// Both kinds present, `n` odd, odd `q` count; subcase by the `q`s.
    MixedOddQ(Subcase),
    /// Both kinds present, even `q` count or `n` even.
    MixedEvenQ(Subcase),
    Unified,
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CaseTag::OnlyP(s) => write!(f, "p-only:{}", s.label()),
            CaseTag::Trivial => f.write_str("trivial"),
            CaseTag::OddQ(s) => write!(f, "q-only-odd:{}", s.label()),
            CaseTag::EvenQ(s) => write!(f, "q-only-even:{}", s.label()),
            CaseTag::MixedOddQ(s) => write!(f, "pq-odd:{}", s.label()),
            CaseTag::MixedEvenQ(s) => write!(f, "pq-even:{}", s.label()),
            CaseTag::Unified => f.write_str("unified"),
        }
    }
}

impl Serialize for CaseTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankResult {
    pub mu: usize,
    pub r_star: u8,
    pub rank: usize,
    #[serde(rename = "case")]
    pub case_tag: CaseTag,
}

impl RankResult {
    /// `rank = mu + r* - 3`.
    pub fn is_consistent(&self) -> bool {
        self.rank + 3 == self.mu + self.r_star as usize
    }
}

pub fn case_of(shape: &NShape) -> CaseTag {
    let (t, s) = (shape.t(), shape.s());
    let odd_q_no_two = shape.delta == 1 && s % 2 == 1;
    match (t, s) {
        (0, 0) => CaseTag::Trivial,
        (_, 0) => CaseTag::OnlyP(Subcase::of(&shape.plist)),
        (0, _) if odd_q_no_two => CaseTag::OddQ(Subcase::of(&shape.qlist)),
        (0, _) => CaseTag::EvenQ(Subcase::of(&shape.qlist)),
        _ if odd_q_no_two => CaseTag::MixedOddQ(Subcase::of(&shape.qlist)),
        _ => CaseTag::MixedEvenQ(Subcase::of(&shape.qlist)),
    }
}

/// Rank via the case theorems, each with its own `mu`, `r*` and formula.
pub fn rank_closed(input: &FieldInput) -> RankResult {
    let shape = n_shape(input);
    rank_closed_for_shape(&shape)
}

pub fn rank_closed_for_shape(shape: &NShape) -> RankResult {
    let case_tag = case_of(shape);
    let (t, t1, t2) = (shape.t() as i64, shape.t1() as i64, shape.t2() as i64);
    let (s, s1, s2) = (shape.s() as i64, shape.s1() as i64, shape.s2() as i64);
    let h = t1 + 2 * t2;
    use Subcase::*;
    let (mu, r_star, rank): (i64, u8, i64) = match case_tag {
        CaseTag::Trivial => (2, 1, 0),
        CaseTag::OnlyP(sub) => {
            let rank = match sub {
                AllInert => t,
                AllSplit => 2 * t,
                Mixed => t1 + 2 * t2,
            };
            (h + 2, 1, rank)
        }
        CaseTag::OddQ(sub) => {
            let mu = s1 + 2 * s2 + 1;
            match sub {
                AllInert => (mu, 1, s - 1),
                AllSplit => (mu, 0, 2 * s - 2),
                Mixed => (mu, 0, s1 + 2 * s2 - 2),
            }
        }
        CaseTag::EvenQ(sub) => {
            let mu = s1 + 2 * s2 + 2;
            match sub {
                AllInert => (mu, 1, s),
                AllSplit => (mu, 0, 2 * s - 1),
                Mixed => (mu, 0, s1 + 2 * s2 - 1),
            }
        }
        CaseTag::MixedOddQ(sub) => {
            let mu = h + s1 + 2 * s2 + 1;
            match sub {
                AllInert => (mu, 1, h + s - 1),
                AllSplit => (mu, 0, h + 2 * s - 2),
                Mixed => (mu, 0, h + s1 + 2 * (s - s1) - 2),
            }
        }
        CaseTag::MixedEvenQ(sub) => {
            let mu = h + s1 + 2 * s2 + 2;
            match sub {
                AllInert => (mu, 1, h + s),
                AllSplit => (mu, 0, h + 2 * s - 1),
                Mixed => (mu, 0, h + s1 + 2 * (s - s1) - 1),
            }
        }
        CaseTag::Unified => unreachable!("case_of never yields Unified"),
    };
    debug_assert!(rank >= 0);
    RankResult { mu: mu as usize, r_star, rank: rank as usize, case_tag }
}

/// Rank via the ambiguous class number formula and the explicit table.
pub fn rank_unified(input: &FieldInput) -> RankResult {
    let shape = n_shape(input);
    let table = character_table(&shape, input.ell());
    let r = r_star(&table);
    debug_assert_eq!(r, r_star_shortcut(&shape));
    let mu = table.columns.len();
    RankResult { mu, r_star: r, rank: mu + r as usize - 3, case_tag: CaseTag::Unified }
}

/// `h + w + ram2 + r* - 2` with `r* = [no split q]`.
pub fn rank_consolidated(shape: &NShape) -> usize {
    shape.h() + shape.w() + usize::from(shape.ram2()) + r_star_shortcut(shape) as usize - 2
}
