//! Descriptors of the quartic field `K = Q(sqrt(n eps0 sqrt(ell)))`:
//! input validation, the canonical form `Q(sqrt(a(ell + b sqrt(ell))))`,
//! the conductor and the defining polynomial.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ntheory::{factor_squarefree, is_prime, two_squares};
use crate::quad::fundamental_unit;

/// A validated pair `(ell, n)`.
///
/// `ell` is a prime `= 5 (mod 8)`, `n` is squarefree, positive and prime to
/// `ell`. The radicand `n eps0 sqrt(ell)` is never materialized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldInput {
    ell: u64,
    n: u64,
    primes: Vec<u64>,
}

impl FieldInput {
    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Ascending prime divisors of `n`, including 2 when `n` is even.
    pub fn primes(&self) -> &[u64] {
        &self.primes
    }
}

/// Checks only the hypotheses on `ell`.
pub fn validate_ell(ell: i64) -> Result<u64> {
    if ell < 2 || !is_prime(ell as u64) {
        return Err(Error::EllNotPrime(ell));
    }
    let ell = ell as u64;
    if ell % 8 != 5 {
        return Err(Error::EllNotFiveMod8(ell));
    }
    Ok(ell)
}

pub fn validate(ell: i64, n: i64) -> Result<FieldInput> {
    let ell = validate_ell(ell)?;
    validate_n(ell, n)
}

/// Validates `n` against an already checked `ell`.
pub fn validate_n(ell: u64, n: i64) -> Result<FieldInput> {
    if n < 1 {
        return Err(Error::NNotPositive(n));
    }
    let n = n as u64;
    let primes = factor_squarefree(n)?;
    if n % ell == 0 {
        return Err(Error::NotCoprime { n, ell });
    }
    Ok(FieldInput { ell, n, primes })
}

/// `K = Q(sqrt(a(ell + b sqrt(ell))))` with `ell = b^2 + c^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WilliamsForm {
    pub a: u64,
    pub b: u64,
    pub c: u64,
}

pub fn to_williams(input: &FieldInput) -> WilliamsForm {
    let ts = two_squares(input.ell);
    let w = WilliamsForm { a: input.n, b: ts.b, c: ts.c };
    if input.n % 2 == 0 {
        let half = WilliamsForm { a: input.n / 2, ..w };
        zink_reduce(half.a, half.b, half.c, input.ell, true)
    } else {
        w
    }
}

pub fn from_williams(w: &WilliamsForm, ell: u64) -> u64 {
    debug_assert_eq!(w.b as u128 * w.b as u128 + w.c as u128 * w.c as u128, ell as u128);
    if w.b % 2 == 1 {
        2 * w.a
    } else {
        w.a
    }
}

/// `Q(sqrt(2a(ell + b sqrt(ell)))) = Q(sqrt(a(ell + c sqrt(ell))))` for odd
/// `a`, `c`. With `doubled` unset the form is returned unchanged.
pub fn zink_reduce(a: u64, b: u64, c: u64, ell: u64, doubled: bool) -> WilliamsForm {
    debug_assert_eq!(b as u128 * b as u128 + c as u128 * c as u128, ell as u128);
    debug_assert!(a % 2 == 1 && c % 2 == 1);
    if doubled {
        WilliamsForm { a, b: c, c: b }
    } else {
        WilliamsForm { a, b, c }
    }
}

/// `f = 2^e a ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conductor {
    pub e: u32,
    pub f: BigUint,
}

/// Conductor for `ell = 1 (mod 4)`:
/// `e = 3` if `b` is odd, otherwise `e = 2` or `0` as `a + b = 3` or `1 (mod 4)`.
pub fn conductor(w: &WilliamsForm, ell: u64) -> Conductor {
    debug_assert_eq!(ell % 4, 1);
    let e = if w.b % 2 == 1 {
        3
    } else if (w.a + w.b) % 4 == 3 {
        2
    } else {
        0
    };
    let f = (BigUint::from(w.a) * BigUint::from(ell)) << e;
    Conductor { e, f }
}

/// `x^4 - n v ell x^2 + n^2 ell`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefiningPolynomial {
    /// Coefficient of `x^2` (negative).
    pub c2: BigInt,
    /// Constant term.
    pub c0: BigInt,
}

impl DefiningPolynomial {
    /// Coefficients from degree 4 down to 0.
    pub fn coefficients(&self) -> [BigInt; 5] {
        [BigInt::from(1), BigInt::zero(), self.c2.clone(), BigInt::zero(), self.c0.clone()]
    }

    /// Eisenstein at `ell`: `ell` divides both lower coefficients, `ell^2`
    /// does not divide the constant term.
    pub fn is_eisenstein_at(&self, ell: u64) -> bool {
        let l = BigInt::from(ell);
        (&self.c2 % &l).is_zero() && (&self.c0 % &l).is_zero() && !(&self.c0 % (&l * &l)).is_zero()
    }

    /// `c0 (c2^2 - 4 c0)`; the quartic `x^4 + c2 x^2 + c0` is cyclic when
    /// this is a rational square.
    pub fn cyclicity_certificate(&self) -> BigInt {
        &self.c0 * (&self.c2 * &self.c2 - BigInt::from(4) * &self.c0)
    }

    /// Exact square root of the certificate, if it is a square.
    pub fn certificate_root(&self) -> Option<BigInt> {
        let cert = self.cyclicity_certificate();
        if cert.sign() == num_bigint::Sign::Minus {
            return None;
        }
        let r = cert.sqrt();
        (&r * &r == cert).then_some(r)
    }
}

pub fn defining_polynomial(input: &FieldInput) -> DefiningPolynomial {
    let unit = fundamental_unit(input.ell);
    let n = BigInt::from(input.n);
    let ell = BigInt::from(input.ell);
    DefiningPolynomial {
        c2: -(&n * BigInt::from(unit.v) * &ell),
        c0: &n * &n * &ell,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wf(a: u64, b: u64, c: u64) -> WilliamsForm {
        WilliamsForm { a, b, c }
    }

    #[test]
    fn validate_examples() {
        assert!(validate(37, 13).is_ok());
        assert_eq!(validate(37, 74), Err(Error::NotCoprime { n: 74, ell: 37 }));
        assert_eq!(validate(13, 12), Err(Error::NotSquarefree { n: 12, prime: 2 }));
        assert_eq!(validate(12, 1), Err(Error::EllNotPrime(12)));
        assert_eq!(validate(-5, 1), Err(Error::EllNotPrime(-5)));
        assert_eq!(validate(17, 1), Err(Error::EllNotFiveMod8(17)));
        assert_eq!(validate(5, 0), Err(Error::NNotPositive(0)));
        assert_eq!(validate(5, -3), Err(Error::NNotPositive(-3)));
        assert_eq!(validate(37, 13).unwrap().primes(), &[13]);
    }

    #[test]
    fn williams_examples() {
        assert_eq!(to_williams(&validate(13, 3).unwrap()), wf(3, 2, 3));
        assert_eq!(to_williams(&validate(13, 6).unwrap()), wf(3, 3, 2));
        assert_eq!(to_williams(&validate(37, 1).unwrap()), wf(1, 6, 1));
        assert_eq!(from_williams(&wf(3, 2, 3), 13), 3);
        assert_eq!(from_williams(&wf(3, 3, 2), 13), 6);
        assert_eq!(from_williams(&wf(1, 2, 1), 5), 1);
    }

    #[test]
    fn zink_examples() {
        assert_eq!(zink_reduce(3, 2, 3, 13, true), wf(3, 3, 2));
        assert_eq!(zink_reduce(1, 2, 1, 5, true), wf(1, 1, 2));
        assert_eq!(zink_reduce(3, 2, 3, 13, false), wf(3, 2, 3));
    }

    #[test]
    fn conductor_examples() {
        let c = conductor(&wf(3, 2, 3), 13);
        assert_eq!((c.e, c.f), (0, BigUint::from(39u32)));
        let c = conductor(&wf(13, 6, 1), 37);
        assert_eq!((c.e, c.f), (2, BigUint::from(1924u32)));
        let c = conductor(&wf(3, 3, 2), 13);
        assert_eq!((c.e, c.f), (3, BigUint::from(312u32)));
    }

    #[test]
    fn polynomial_examples() {
        for (ell, n, c2, c0) in [(5, 1, -5, 5), (13, 1, -13, 13), (13, 2, -26, 52)] {
            let p = defining_polynomial(&validate(ell, n).unwrap());
            assert_eq!(p.c2, BigInt::from(c2));
            assert_eq!(p.c0, BigInt::from(c0));
            assert!(p.is_eisenstein_at(ell as u64));
        }
    }

    #[test]
    fn cyclicity_certificate_is_n2_ell_u() {
        for ell in [5i64, 13, 29, 37, 53, 61, 101, 1621] {
            let u = BigInt::from(fundamental_unit(ell as u64).u);
            for n in [1i64, 2, 3, 6, 7, 11, 13 * 17] {
                let Ok(input) = validate(ell, n) else { continue };
                let p = defining_polynomial(&input);
                let expect = BigInt::from(n * n) * BigInt::from(ell) * &u;
                assert_eq!(p.certificate_root(), Some(expect));
                assert!(p.is_eisenstein_at(ell as u64));
            }
        }
    }

    #[test]
    fn williams_round_trip_and_conductor_parity_bridge() {
        for ell in [5i64, 13, 29, 37, 53, 61] {
            for n in 1..1500 {
                let Ok(input) = validate(ell, n) else { continue };
                let w = to_williams(&input);
                assert_eq!(from_williams(&w, ell as u64), n as u64);
                assert_eq!(w.b * w.b + w.c * w.c, ell as u64);
                assert_eq!(w.a % 2, 1);
                let q_count = input.primes().iter().filter(|&&p| p % 4 == 3).count();
                let e = conductor(&w, ell as u64).e;
                assert_eq!(e == 0, n % 2 == 1 && q_count % 2 == 1, "ell={ell} n={n}");
            }
        }
    }
}
