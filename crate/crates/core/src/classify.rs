//! Recognition of the fields with 2-rank 0, 1, 2 or 3 from the shape of `n`
//! alone, and enumeration of the `n` that realize a given rank.
//!
//! Patterns only read the counts and split/inert tags of an [`NShape`]; no
//! residue symbols are recomputed here.

use std::fmt;

use serde::Serialize;

use crate::quartic::{validate_ell, validate_n};
use crate::rank::{n_shape, rank_closed_for_shape, NShape};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PatternId {
    pub rank: u8,
    pub item: u8,
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}.{}", self.rank, self.item)
    }
}

#[derive(Clone, Copy)]
pub struct ShapePattern {
    /// `id.rank` is the rank of every shape matching this pattern.
    pub id: PatternId,
    pub description: &'static str,
    pub predicate: fn(&Counts) -> bool,
}

impl fmt::Debug for ShapePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ShapePattern")
            .field("id", &self.id)
            .field("description", &self.description)
            .finish()
    }
}

impl PartialEq for ShapePattern {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}

impl ShapePattern {
    pub fn matches(&self, shape: &NShape) -> bool {
        (self.predicate)(&Counts::of(shape))
    }
}

/// Shape statistics the patterns are written against. "Inert" means the
/// Legendre symbol modulo `ell` is `-1`, "split" that it is `+1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Counts {
    pub even: bool,
    pub p_inert: usize,
    pub p_split: usize,
    pub q_inert: usize,
    pub q_split: usize,
}

impl Counts {
    pub fn of(shape: &NShape) -> Counts {
        Counts {
            even: shape.delta == 2,
            p_inert: shape.t1(),
            p_split: shape.t2(),
            q_inert: shape.s1(),
            q_split: shape.s2(),
        }
    }
    fn p(&self) -> usize {
        self.p_inert + self.p_split
    }
    fn q(&self) -> usize {
        self.q_inert + self.q_split
    }
    fn odd(&self) -> bool {
        !self.even
    }
}

macro_rules! pattern {
    ($rank:expr, $item:expr, $desc:expr, |$c:ident| $body:expr) => {
        ShapePattern {
            id: PatternId { rank: $rank, item: $item },
            description: $desc,
            predicate: {
                fn pred($c: &Counts) -> bool {
                    $body
                }
                pred
            },
        }
    };
}

/// All 23 patterns, grouped by rank.
pub static PATTERNS: [ShapePattern; 23] = [
    // odd class number
    pattern!(0, 1, "n = 1 or 2", |c| c.p() == 0 && c.q() == 0),
    pattern!(0, 2, "n = q", |c| c.odd() && c.p() == 0 && c.q() == 1),
    // cyclic
    pattern!(1, 1, "n = delta p, (p/l) = -1", |c| c.p_inert == 1 && c.p_split == 0 && c.q() == 0),
    pattern!(1, 2, "n = 2q", |c| c.even && c.p() == 0 && c.q() == 1),
    pattern!(1, 3, "n = pq, (p/l) = -1", |c| c.odd() && c.p_inert == 1 && c.p_split == 0 && c.q() == 1),
    // rank 2
    pattern!(2, 1, "n = delta p, (p/l) = 1", |c| c.p_split == 1 && c.p_inert == 0 && c.q() == 0),
    pattern!(2, 2, "n = delta p1 p2, both (pi/l) = -1", |c| c.p_inert == 2 && c.p_split == 0 && c.q() == 0),
    pattern!(2, 3, "n = pq, (p/l) = 1", |c| c.odd() && c.p_split == 1 && c.p_inert == 0 && c.q() == 1),
    pattern!(2, 4, "n = 2pq, (p/l) = -1", |c| c.even && c.p_inert == 1 && c.p_split == 0 && c.q() == 1),
    pattern!(2, 5, "n = p1 p2 q, both (pi/l) = -1", |c| c.odd()
        && c.p_inert == 2
        && c.p_split == 0
        && c.q() == 1),
    pattern!(2, 6, "n = delta q1 q2, at least one (qi/l) = -1", |c| c.p() == 0
        && c.q() == 2
        && c.q_inert >= 1),
    pattern!(2, 7, "n = q1 q2 q3, at most one (qi/l) = 1", |c| c.odd()
        && c.p() == 0
        && c.q() == 3
        && c.q_split <= 1),
    // rank 3
    pattern!(3, 1, "n = delta p1 p2, (p1/l) = -(p2/l) = 1", |c| c.p_inert == 1
        && c.p_split == 1
        && c.q() == 0),
    pattern!(3, 2, "n = delta p1 p2 p3, all (pi/l) = -1", |c| c.p_inert == 3 && c.p_split == 0 && c.q() == 0),
    pattern!(3, 3, "n = 2pq, (p/l) = 1", |c| c.even && c.p_split == 1 && c.p_inert == 0 && c.q() == 1),
    pattern!(3, 4, "n = delta q1 q2, both (qi/l) = 1", |c| c.p() == 0 && c.q_split == 2 && c.q_inert == 0),
    pattern!(3, 5, "n = q1 q2 q3, exactly one (qi/l) = -1", |c| c.odd()
        && c.p() == 0
        && c.q_inert == 1
        && c.q_split == 2),
    pattern!(3, 6, "n = 2 q1 q2 q3, at most one (qi/l) = 1", |c| c.even
        && c.p() == 0
        && c.q() == 3
        && c.q_split <= 1),
    pattern!(3, 7, "n = p1 p2 q, (p1/l) = -(p2/l) = 1", |c| c.odd()
        && c.p_inert == 1
        && c.p_split == 1
        && c.q() == 1),
    pattern!(3, 8, "n = 2 p1 p2 q, both (pi/l) = -1", |c| c.even
        && c.p_inert == 2
        && c.p_split == 0
        && c.q() == 1),
    pattern!(3, 9, "n = delta p q1 q2, (p/l) = -1, at least one (qi/l) = -1", |c| c.p_inert == 1
        && c.p_split == 0
        && c.q() == 2
        && c.q_inert >= 1),
    pattern!(3, 10, "n = p q1 q2 q3, (p/l) = -1, at most one (qi/l) = 1", |c| c.odd()
        && c.p_inert == 1
        && c.p_split == 0
        && c.q() == 3
        && c.q_split <= 1),
    pattern!(3, 11, "n = p1 p2 p3 q, all (pi/l) = -1", |c| c.odd()
        && c.p_inert == 3
        && c.p_split == 0
        && c.q() == 1),
];

/// Patterns of a given rank, in item order.
pub fn patterns_for_rank(rank: u8) -> impl Iterator<Item = &'static ShapePattern> {
    PATTERNS.iter().filter(move |p| p.id.rank == rank)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Classification {
    SmallRank { rank: u8, pattern: &'static ShapePattern },
    AtLeast4,
}

impl Classification {
    pub fn rank(&self) -> Option<u8> {
        match self {
            Classification::SmallRank { rank, .. } => Some(*rank),
            Classification::AtLeast4 => None,
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Classification::SmallRank { rank, pattern } => {
                write!(f, "rank {rank} (pattern {}: {})", pattern.id, pattern.description)
            }
            Classification::AtLeast4 => f.write_str("rank >= 4 (no pattern matches)"),
        }
    }
}

pub fn classify_shape(shape: &NShape) -> Classification {
    let counts = Counts::of(shape);
    PATTERNS
        .iter()
        .find(|p| (p.predicate)(&counts))
        .map_or(Classification::AtLeast4, |p| Classification::SmallRank { rank: p.id.rank, pattern: p })
}

pub fn classify_small_rank(input: &crate::quartic::FieldInput) -> Classification {
    classify_shape(&n_shape(input))
}

/// All valid `n <= n_max` whose field has 2-rank `target`, ascending.
/// Ranks up to 3 are decided by the patterns, larger ones by the case
/// theorems.
pub fn enumerate_rank(ell: i64, n_max: u64, target: usize) -> Result<Vec<u64>> {
    let ell = validate_ell(ell)?;
    let mut out = Vec::new();
    for n in 1..=n_max {
        let Ok(input) = validate_n(ell, n as i64) else { continue };
        let shape = n_shape(&input);
        let rank = match classify_shape(&shape) {
            Classification::SmallRank { rank, .. } => rank as usize,
            Classification::AtLeast4 => rank_closed_for_shape(&shape).rank,
        };
        if rank == target {
            out.push(n);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quartic::validate;
    use crate::rank::rank_closed;

    fn cls(ell: i64, n: i64) -> Classification {
        classify_small_rank(&validate(ell, n).unwrap())
    }

    fn id(rank: u8, item: u8) -> PatternId {
        PatternId { rank, item }
    }

    #[test]
    fn pattern_counts() {
        let counts: Vec<usize> = (0..4).map(|r| patterns_for_rank(r).count()).collect();
        assert_eq!(counts, vec![2, 3, 7, 11]);
    }

    #[test]
    fn classify_examples() {
        match cls(173, 1) {
            Classification::SmallRank { rank, pattern } => assert_eq!((rank, pattern.id), (0, id(0, 1))),
            other => panic!("{other:?}"),
        }
        match cls(53, 2 * 19) {
            Classification::SmallRank { rank, pattern } => assert_eq!((rank, pattern.id), (1, id(1, 2))),
            other => panic!("{other:?}"),
        }
        match cls(61, 23 * 71 * 83) {
            Classification::SmallRank { rank, pattern } => assert_eq!((rank, pattern.id), (2, id(2, 7))),
            other => panic!("{other:?}"),
        }
        // three split q's: rank 4
        assert_eq!(cls(13, 3 * 23 * 43).rank(), None);
        assert!(rank_closed(&validate(13, 3 * 23 * 43).unwrap()).rank >= 4);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(enumerate_rank(37, 2, 0).unwrap(), vec![1, 2]);
        assert!(enumerate_rank(37, 13, 1).unwrap().contains(&13));
        let r3 = enumerate_rank(5, 3293, 3).unwrap();
        assert!(r3.contains(&3293));
        assert!(r3.windows(2).all(|w| w[0] < w[1]));
        assert!(enumerate_rank(12, 10, 0).is_err());
        assert!(enumerate_rank(37, 0, 0).unwrap().is_empty());
    }

    #[test]
    fn agrees_with_case_theorems_and_patterns_exclusive() {
        for ell in [5i64, 13, 29, 37, 53, 61] {
            for n in 1..1500 {
                let Ok(input) = validate(ell, n) else { continue };
                let shape = n_shape(&input);
                let matching: Vec<_> = PATTERNS.iter().filter(|p| p.matches(&shape)).collect();
                assert!(matching.len() <= 1, "ell={ell} n={n}: {matching:?}");
                let rank = rank_closed(&input).rank;
                match classify_shape(&shape).rank() {
                    Some(r) => assert_eq!(r as usize, rank, "ell={ell} n={n}"),
                    None => assert!(rank >= 4, "ell={ell} n={n}"),
                }
            }
        }
    }
}
