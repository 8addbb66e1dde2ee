//! Exact integer primitives: primality, factorization, Legendre and rational
//! quartic residue symbols, and the two-squares decomposition of primes
//! congruent to 1 mod 4.
//!
//! Everything here works on machine words. Products are formed in `u128`
//! so no intermediate can wrap.

use crate::error::{Error, Result};

/// Full factorization `n = prod p^e` with strictly ascending primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeFactorization {
    pub factors: Vec<(u64, u32)>,
}

impl PrimeFactorization {
    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Re-multiplies the factorization. `None` on overflow.
    pub fn value(&self) -> Option<u64> {
        self.factors.iter().try_fold(1u64, |acc, &(p, e)| acc.checked_mul(p.checked_pow(e)?))
    }
}

/// `ell = b^2 + c^2` with `b` even and `c` odd, both positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwoSquares {
    pub b: u64,
    pub c: u64,
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Floor of the square root.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    // the float estimate can be off by a few units near 2^128
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

pub fn is_square(n: u128) -> bool {
    let r = isqrt(n);
    r * r == n
}

/// Reduces a signed integer into `[0, m)`.
#[inline]
pub fn rem_euclid_u64(a: i64, m: u64) -> u64 {
    let r = (a as i128).rem_euclid(m as i128);
    r as u64
}

// Bases 2..37 make Miller-Rabin exact for every n < 3.3 * 10^24, which
// covers all of u64.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test, unconditional on all of `u64`.
pub fn is_prime(m: u64) -> bool {
    if m < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if m == p {
            return true;
        }
        if m % p == 0 {
            return false;
        }
    }
    let mut d = m - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const TRIAL_BOUND: u64 = 1 << 16;
const WHEEL: [u64; 8] = [1, 7, 11, 13, 17, 19, 23, 29];

/// Factors `n >= 1` completely: wheel trial division below 2^16, then
/// Brent's variant of Pollard rho on whatever cofactor is left.
pub fn factor(n: u64) -> PrimeFactorization {
    assert!(n >= 1, "factor: n must be positive");
    let mut rest = n;
    let mut found: Vec<u64> = Vec::new();
    for p in [2u64, 3, 5] {
        while rest % p == 0 {
            found.push(p);
            rest /= p;
        }
    }
    let mut base = 0u64;
    'trial: loop {
        for &off in &WHEEL {
            let d = base + off;
            if d < 7 {
                continue;
            }
            if d > TRIAL_BOUND || d * d > rest {
                break 'trial;
            }
            while rest % d == 0 {
                found.push(d);
                rest /= d;
            }
        }
        base += 30;
    }
    if rest > 1 {
        split_large(rest, &mut found);
    }
    found.sort_unstable();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for p in found {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    PrimeFactorization { factors }
}

fn split_large(m: u64, out: &mut Vec<u64>) {
    if m == 1 {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    let r = isqrt(m as u128) as u64;
    if r * r == m {
        split_large(r, out);
        split_large(r, out);
        return;
    }
    let d = (1..)
        .find_map(|c| pollard_brent(m, c))
        .expect("rho finds a factor of every odd composite for some constant");
    split_large(d, out);
    split_large(m / d, out);
}

fn pollard_brent(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
    let mut g = 1u64;
    let mut x = y;
    let mut ys = y;
    let m = 128u64;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = num_integer::gcd(q, n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = num_integer::gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// Ascending distinct primes of a squarefree `n`; empty for `n = 1`.
pub fn factor_squarefree(n: u64) -> Result<Vec<u64>> {
    let f = factor(n);
    if let Some(&(prime, _)) = f.factors.iter().find(|&&(_, e)| e > 1) {
        return Err(Error::NotSquarefree { n, prime });
    }
    Ok(f.primes().collect())
}

/// Legendre symbol `(a/p)` for an odd prime `p`, computed by the binary
/// Jacobi algorithm.
pub fn legendre(a: i64, p: u64) -> i8 {
    debug_assert!(p % 2 == 1, "legendre: modulus must be odd");
    let mut a = rem_euclid_u64(a, p);
    let mut m = p;
    let mut sign = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(m % 8, 3 | 5) {
                sign = -sign;
            }
        }
        std::mem::swap(&mut a, &mut m);
        if a % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        a %= m;
    }
    if m == 1 {
        sign
    } else {
        0
    }
}

/// Rational quartic residue symbol `(a/p)_4`.
///
/// Defined only when `a` is a nonzero square mod `p`. For `p = 1 (mod 4)`
/// it is `a^((p-1)/4) mod p`. For `p = 3 (mod 4)` the squares form a group
/// of odd order, every square is a fourth power, and the symbol is `+1`.
pub fn quartic_symbol(a: i64, p: u64) -> Result<i8> {
    if legendre(a, p) != 1 {
        return Err(Error::NotQuadraticResidue { a, p });
    }
    if p % 4 == 3 {
        return Ok(1);
    }
    let r = pow_mod(rem_euclid_u64(a, p), (p - 1) / 4, p);
    if r == 1 {
        Ok(1)
    } else {
        debug_assert_eq!(r, p - 1);
        Ok(-1)
    }
}

/// Square root of `-1` modulo a prime `p = 1 (mod 4)`.
pub fn sqrt_minus_one(p: u64) -> u64 {
    let z = (2..p)
        .find(|&z| legendre(z as i64, p) == -1)
        .expect("a prime = 1 mod 4 has a quadratic non-residue");
    pow_mod(z, (p - 1) / 4, p)
}

/// Cornacchia's algorithm for `x^2 + y^2 = ell`, `ell` prime `= 1 (mod 4)`.
pub fn two_squares(ell: u64) -> TwoSquares {
    assert!(ell % 4 == 1, "two_squares: ell must be 1 mod 4");
    let mut r0 = sqrt_minus_one(ell);
    if r0 < ell / 2 {
        r0 = ell - r0;
    }
    let (mut a, mut b) = (ell, r0);
    while (b as u128) * (b as u128) > ell as u128 {
        (a, b) = (b, a % b);
    }
    let x = b;
    let y2 = ell - x * x;
    let y = isqrt(y2 as u128) as u64;
    assert_eq!(y * y, y2, "Cornacchia failed; is {ell} prime?");
    if x % 2 == 0 {
        TwoSquares { b: x, c: y }
    } else {
        TwoSquares { b: y, c: x }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_division_is_prime(m: u64) -> bool {
        m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| m % d != 0)
    }

    fn euler_legendre(a: i64, p: u64) -> i8 {
        let r = pow_mod(rem_euclid_u64(a, p), (p - 1) / 2, p);
        match r {
            0 => 0,
            1 => 1,
            _ => -1,
        }
    }

    fn brute_two_squares(ell: u64) -> (u64, u64) {
        (1..)
            .take_while(|b| b * b < ell)
            .filter(|b| b % 2 == 0)
            .find_map(|b| {
                let c2 = ell - b * b;
                let c = isqrt(c2 as u128) as u64;
                (c * c == c2).then_some((b, c))
            })
            .unwrap()
    }

    #[test]
    fn primality_examples() {
        assert!(!is_prime(1));
        assert!(is_prime(37));
        assert!(!is_prime(3293));
        assert!(!is_prime(51));
    }

    #[test]
    fn primality_matches_trial_division_below_20000() {
        for m in 0..20_000u64 {
            assert_eq!(is_prime(m), trial_division_is_prime(m), "m = {m}");
        }
    }

    #[test]
    fn primality_large_known_values() {
        assert!(is_prime(18_446_744_073_709_551_557)); // largest prime below 2^64
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2, 3, 5, 7
        assert!(!is_prime(4_294_967_297)); // 641 * 6700417
        assert!(is_prime(4_294_967_291));
    }

    #[test]
    fn squarefree_examples() {
        assert_eq!(factor_squarefree(1).unwrap(), Vec::<u64>::new());
        assert_eq!(factor_squarefree(3293).unwrap(), vec![37, 89]);
        assert_eq!(
            factor_squarefree(12),
            Err(Error::NotSquarefree { n: 12, prime: 2 })
        );
    }

    #[test]
    fn factor_needs_rho() {
        let n = 4_294_967_291u64 * 4_294_967_279;
        let f = factor(n);
        assert_eq!(f.factors, vec![(4_294_967_279, 1), (4_294_967_291, 1)]);
        let sq = 1_000_003u64 * 1_000_003;
        assert_eq!(factor(sq).factors, vec![(1_000_003, 2)]);
        assert!(factor_squarefree(sq * 2).is_err());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(13, 37), -1);
        assert_eq!(legendre(1, 101), 1);
        assert_eq!(legendre(2, 53), euler_legendre(2, 53));
        assert_eq!(legendre(2, 53), -1);
        assert_eq!(legendre(0, 53), 0);
        assert_eq!(legendre(-1, 13), 1);
        assert_eq!(legendre(-1, 7), -1);
    }

    #[test]
    fn legendre_matches_euler_criterion() {
        for p in (3..400u64).filter(|&p| trial_division_is_prime(p)) {
            for a in -50i64..200 {
                assert_eq!(legendre(a, p), euler_legendre(a, p), "a={a} p={p}");
            }
        }
    }

    #[test]
    fn quartic_symbol_examples() {
        // 5^7 = 28 (mod 29)
        assert_eq!(pow_mod(5, 7, 29), 28);
        assert_eq!(quartic_symbol(5, 29), Ok(-1));
        assert_eq!(quartic_symbol(1, 29), Ok(1));
        assert_eq!(quartic_symbol(1, 7), Ok(1));
        assert_eq!(quartic_symbol(2, 7), Ok(1));
        assert_eq!(
            quartic_symbol(3, 7),
            Err(Error::NotQuadraticResidue { a: 3, p: 7 })
        );
        assert!(quartic_symbol(0, 13).is_err());
    }

    #[test]
    fn quartic_symbol_detects_fourth_powers() {
        for p in (5..300u64).filter(|&p| p % 4 == 1 && trial_division_is_prime(p)) {
            let fourth: Vec<u64> = (1..p).map(|x| pow_mod(x, 4, p)).collect();
            for a in 1..p {
                if legendre(a as i64, p) == 1 {
                    let expect = if fourth.contains(&a) { 1 } else { -1 };
                    assert_eq!(quartic_symbol(a as i64, p).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn two_squares_examples() {
        assert_eq!(two_squares(5), TwoSquares { b: 2, c: 1 });
        assert_eq!(two_squares(13), TwoSquares { b: 2, c: 3 });
        assert_eq!(two_squares(37), TwoSquares { b: 6, c: 1 });
    }

    #[test]
    fn two_squares_matches_exhaustive_search() {
        for ell in (5..20_000u64).filter(|&p| p % 4 == 1 && trial_division_is_prime(p)) {
            let ts = two_squares(ell);
            assert_eq!(ts.b * ts.b + ts.c * ts.c, ell);
            assert_eq!((ts.b, ts.c), brute_two_squares(ell));
            if ell % 8 == 5 {
                assert_eq!(ts.b % 4, 2);
            }
        }
    }

    proptest! {
        #[test]
        fn legendre_is_multiplicative(a in 1i64..100_000, b in 1i64..100_000, idx in 0usize..60) {
            let primes: Vec<u64> = (3..300u64).filter(|&p| trial_division_is_prime(p)).collect();
            let p = primes[idx % primes.len()];
            prop_assume!(a as u64 % p != 0 && b as u64 % p != 0);
            prop_assert_eq!(legendre(a * b, p), legendre(a, p) * legendre(b, p));
        }

        #[test]
        fn quartic_symbol_of_square_is_trivial(a in 1i64..1_000_000, idx in 0usize..60) {
            let primes: Vec<u64> = (5..400u64).filter(|&p| p % 4 == 1 && trial_division_is_prime(p)).collect();
            let p = primes[idx % primes.len()];
            prop_assume!(legendre(a, p) == 1);
            let q = quartic_symbol(a, p).unwrap();
            prop_assert!(q == 1 || q == -1);
            prop_assert_eq!(quartic_symbol((a % p as i64) * (a % p as i64), p).unwrap(), 1);
        }

        #[test]
        fn factorization_remultiplies(n in 1u64..u64::MAX / 2) {
            let f = factor(n);
            prop_assert_eq!(f.value(), Some(n));
            prop_assert!(f.factors.windows(2).all(|w| w[0].0 < w[1].0));
            prop_assert!(f.primes().all(is_prime));
            if let Ok(ps) = factor_squarefree(n) {
                prop_assert_eq!(ps.iter().product::<u64>(), n);
            } else {
                prop_assert!(!f.is_squarefree());
            }
        }
    }
}
