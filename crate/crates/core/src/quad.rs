//! The real quadratic subfield `k = Q(sqrt(ell))`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::ntheory::{isqrt, legendre};

/// `eps0 = (u + v sqrt(ell)) / 2` with `u^2 - ell v^2 = -4` and `v` minimal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub u: BigUint,
    pub v: BigUint,
}

impl FundamentalUnit {
    /// `u^2 - ell v^2`, which is `-4` for a valid unit.
    pub fn norm_times_four(&self, ell: u64) -> BigInt {
        let u2 = BigInt::from(&self.u * &self.u);
        let lv2 = BigInt::from(&self.v * &self.v * BigUint::from(ell));
        u2 - lv2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SplittingType {
    Inert,
    Split,
    Ramified,
}

impl SplittingType {
    pub fn letter(self) -> char {
        match self {
            SplittingType::Inert => 'I',
            SplittingType::Split => 'S',
            SplittingType::Ramified => 'R',
        }
    }
}

/// Fundamental unit of `k` for a prime `ell = 5 (mod 8)`.
///
/// Expands `omega = (1 + sqrt(ell)) / 2` as a continued fraction. The first
/// convergent `h/k` with `N(h - k omega) = +-1` gives the unit
/// `h - k conj(omega) = ((2h - k) + k sqrt(ell)) / 2`.
pub fn fundamental_unit(ell: u64) -> FundamentalUnit {
    assert!(ell % 8 == 5, "fundamental_unit: ell must be 5 mod 8");
    let root = isqrt(ell as u128) as u64;
    let quarter = BigInt::from((ell - 1) / 4);
    // complete quotient (p + sqrt(ell)) / q
    let (mut p, mut q) = (1u64, 2u64);
    let (mut h, mut h_prev) = (BigInt::one(), BigInt::zero());
    let (mut k, mut k_prev) = (BigInt::zero(), BigInt::one());
    loop {
        let a = BigInt::from((p + root) / q);
        (h, h_prev) = (&a * &h + &h_prev, h);
        (k, k_prev) = (&a * &k + &k_prev, k);
        let norm = &h * &h - &h * &k - &k * &k * &quarter;
        if norm == BigInt::from(-1) || norm == BigInt::one() {
            debug_assert_eq!(norm, BigInt::from(-1), "prime ell = 1 mod 4 has a unit of norm -1");
            let u = (BigInt::from(2) * &h - &k).to_biguint().expect("u > 0");
            let v = k.to_biguint().expect("v > 0");
            return FundamentalUnit { u, v };
        }
        let a = (p + root) / q;
        p = a * q - p;
        q = (ell - p * p) / q;
    }
}

/// How the rational prime `r` decomposes in `k`.
pub fn splitting_type(r: u64, ell: u64) -> SplittingType {
    if r == ell {
        SplittingType::Ramified
    } else if r == 2 {
        SplittingType::Inert
    } else if legendre(r as i64, ell) == 1 {
        SplittingType::Split
    } else {
        SplittingType::Inert
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::is_prime;

    fn brute_unit(ell: u64, cap: u64) -> Option<(u64, u64)> {
        (1..=cap).find_map(|v| {
            let u2 = ell as u128 * v as u128 * v as u128 - 4;
            let u = isqrt(u2);
            (u * u == u2).then_some((u as u64, v))
        })
    }

    #[test]
    fn unit_examples() {
        for (ell, u, v) in [(5u64, 1u32, 1u32), (13, 3, 1), (29, 5, 1)] {
            assert_eq!(brute_unit(ell, 10), Some((u as u64, v as u64)));
            let e = fundamental_unit(ell);
            assert_eq!((e.u, e.v), (BigUint::from(u), BigUint::from(v)));
        }
    }

    #[test]
    fn unit_identity_and_parity() {
        for ell in (5..3000u64).step_by(8).filter(|&l| is_prime(l)) {
            let e = fundamental_unit(ell);
            assert_eq!(e.norm_times_four(ell), BigInt::from(-4), "ell={ell}");
            // u^2 = ell v^2 (mod 4) forces equal parity; 37 gives (12, 2)
            assert_eq!(e.u.bit(0), e.v.bit(0), "parity for ell={ell}");
        }
    }

    #[test]
    fn unit_minimal_against_brute_force() {
        for ell in (5..700u64).step_by(8).filter(|&l| is_prime(l)) {
            let e = fundamental_unit(ell);
            let (u, v) = brute_unit(ell, 1_000_000).expect("small ell");
            assert_eq!((e.u, e.v), (BigUint::from(u), BigUint::from(v)));
        }
    }

    #[test]
    fn even_unit_coordinates_occur() {
        let e = fundamental_unit(37);
        assert_eq!((e.u, e.v), (BigUint::from(12u32), BigUint::from(2u32)));
    }

    #[test]
    fn unit_exceeds_word_size() {
        // 1621 has a 20+ digit unit; make sure nothing overflows
        let e = fundamental_unit(1621);
        assert_eq!(e.norm_times_four(1621), BigInt::from(-4));
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(splitting_type(13, 37), SplittingType::Inert);
        assert_eq!(splitting_type(13, 101), SplittingType::Split);
        assert_eq!(splitting_type(2, 53), SplittingType::Inert);
        assert_eq!(splitting_type(53, 53), SplittingType::Ramified);
    }

    #[test]
    fn splitting_agrees_with_reciprocity() {
        for ell in [5u64, 13, 29, 37, 53, 61, 101, 109] {
            for r in (3..2000u64).filter(|&r| is_prime(r) && r != ell) {
                let split = splitting_type(r, ell) == SplittingType::Split;
                assert_eq!(split, legendre(ell as i64, r) == 1, "r={r} ell={ell}");
            }
            for r in (3..200u64).filter(|&r| is_prime(r)) {
                let t = splitting_type(r, ell);
                assert_eq!(t == SplittingType::Ramified, r == ell);
            }
        }
    }
}
