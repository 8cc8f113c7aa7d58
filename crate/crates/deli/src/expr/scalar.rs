//! Exact scalar arithmetic over `a + b*sqrt(d)` with rational `a`, `b` and
//! squarefree integer `d`. Plain rationals are the `b = 0` case.
//!
//! A single radical per value keeps quadratic roots, their sums, and their
//! products exact. Combining values over distinct radicals that cannot be
//! merged (e.g. `sqrt(2) + sqrt(3)`) is reported as an error rather than
//! approximated.

use std::cmp::Ordering;
use std::fmt;

use num::bigint::BigInt;
use num::{BigRational, BigUint, Integer, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("distinct radicals cannot be combined exactly")]
    MixedRadicals,
    #[error("division by zero")]
    DivisionByZero,
    #[error("square root of a negative value")]
    NegativeRadicand,
}

/// Exact value `a + b*sqrt(d)`; `d` is squarefree and `>= 2` whenever
/// `b != 0`, otherwise `d == 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scalar {
    a: BigRational,
    b: BigRational,
    d: BigUint,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar::from_rational(BigRational::zero())
    }

    pub fn one() -> Scalar {
        Scalar::from_rational(BigRational::one())
    }

    pub fn from_rational(a: BigRational) -> Scalar {
        Scalar {
            a,
            b: BigRational::zero(),
            d: BigUint::one(),
        }
    }

    pub fn from_int(v: i64) -> Scalar {
        Scalar::from_rational(BigRational::from_integer(v.into()))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Scalar {
        Scalar::from_rational(BigRational::new(numer.into(), denom.into()))
    }

    /// Build `a + b*sqrt(d)`, normalizing the radical.
    pub fn surd(a: BigRational, b: BigRational, d: BigUint) -> Scalar {
        if b.is_zero() || d.is_zero() {
            return Scalar::from_rational(a);
        }
        let (square, free) = split_square(&d);
        let b = b * BigRational::from_integer(BigInt::from(square));
        if free.is_one() {
            Scalar::from_rational(a + b)
        } else {
            Scalar { a, b, d: free }
        }
    }

    /// Exact square root of a nonnegative rational.
    pub fn sqrt_rational(r: &BigRational) -> Result<Scalar, ScalarError> {
        if r.is_negative() {
            return Err(ScalarError::NegativeRadicand);
        }
        // sqrt(p/q) = sqrt(p*q) / q
        let p = r.numer().magnitude().clone();
        let q = r.denom().magnitude().clone();
        let (square, free) = split_square(&(p * &q));
        let scale = BigRational::new(BigInt::from(square), BigInt::from(q));
        if free.is_one() {
            Ok(Scalar::from_rational(scale))
        } else {
            Ok(Scalar {
                a: BigRational::zero(),
                b: scale,
                d: free,
            })
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a.is_one()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.b.is_zero().then_some(&self.a)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> (&BigRational, &BigUint) {
        (&self.b, &self.d)
    }

    pub fn neg(&self) -> Scalar {
        Scalar {
            a: -self.a.clone(),
            b: -self.b.clone(),
            d: self.d.clone(),
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        if self.b.is_zero() {
            return Ok(Scalar {
                a: &self.a + &other.a,
                b: other.b.clone(),
                d: other.d.clone(),
            });
        }
        if other.b.is_zero() {
            return Ok(Scalar {
                a: &self.a + &other.a,
                b: self.b.clone(),
                d: self.d.clone(),
            });
        }
        if self.d == other.d {
            let b = &self.b + &other.b;
            let d = if b.is_zero() {
                BigUint::one()
            } else {
                self.d.clone()
            };
            return Ok(Scalar {
                a: &self.a + &other.a,
                b,
                d,
            });
        }
        Err(ScalarError::MixedRadicals)
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        if self.b.is_zero() {
            return Ok(Scalar {
                a: &self.a * &other.a,
                b: &self.a * &other.b,
                d: other.d.clone(),
            }
            .renormalize());
        }
        if other.b.is_zero() {
            return other.mul(self);
        }
        if self.d == other.d {
            let d_rat = BigRational::from_integer(BigInt::from(self.d.clone()));
            let a = &self.a * &other.a + &self.b * &other.b * d_rat;
            let b = &self.a * &other.b + &self.b * &other.a;
            let d = if b.is_zero() {
                BigUint::one()
            } else {
                self.d.clone()
            };
            return Ok(Scalar { a, b, d });
        }
        // Distinct radicals: only the pure-surd product stays in form,
        // via sqrt(d1)*sqrt(d2) = g*sqrt(p*q) for d1 = g*p, d2 = g*q.
        if self.a.is_zero() && other.a.is_zero() {
            let g = self.d.gcd(&other.d);
            let p = &self.d / &g;
            let q = &other.d / &g;
            let coeff = &self.b * &other.b * BigRational::from_integer(BigInt::from(g));
            return Ok(Scalar::surd(BigRational::zero(), coeff, p * q));
        }
        Err(ScalarError::MixedRadicals)
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.mul(&other.inverse()?)
    }

    pub fn inverse(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if self.b.is_zero() {
            return Ok(Scalar::from_rational(self.a.recip()));
        }
        // 1/(a + b*sqrt(d)) = (a - b*sqrt(d)) / (a^2 - b^2 d); the norm is
        // nonzero because sqrt(d) is irrational here.
        let d_rat = BigRational::from_integer(BigInt::from(self.d.clone()));
        let norm = &self.a * &self.a - &self.b * &self.b * d_rat;
        Ok(Scalar {
            a: &self.a / &norm,
            b: -(&self.b / &norm),
            d: self.d.clone(),
        })
    }

    fn renormalize(self) -> Scalar {
        if self.b.is_zero() && !self.d.is_one() {
            Scalar {
                d: BigUint::one(),
                ..self
            }
        } else {
            self
        }
    }

    /// Exact sign: -1, 0, or 1.
    pub fn signum(&self) -> i8 {
        sign_of_surd(&self.a, &self.b, &self.d)
    }

    /// Exact numeric comparison; works across distinct radicals.
    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        // self - other = (a1 - a2) + b1*sqrt(d1) - b2*sqrt(d2)
        let alpha = &self.a - &other.a;
        match sign_of_two_surds(&alpha, &self.b, &self.d, &(-other.b.clone()), &other.d) {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}*sqrt({})", self.b, self.d);
        }
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
    }
}

/// Sign of `alpha + beta*sqrt(d)` with `d` squarefree.
fn sign_of_surd(alpha: &BigRational, beta: &BigRational, d: &BigUint) -> i8 {
    if beta.is_zero() {
        return rational_sign(alpha);
    }
    if alpha.is_zero() {
        return rational_sign(beta);
    }
    let sa = rational_sign(alpha);
    let sb = rational_sign(beta);
    if sa == sb {
        return sa;
    }
    // Opposite signs: compare alpha^2 with beta^2 * d.
    let d_rat = BigRational::from_integer(BigInt::from(d.clone()));
    let lhs = alpha * alpha;
    let rhs = beta * beta * d_rat;
    match lhs.cmp(&rhs) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => 0,
    }
}

/// Sign of `alpha + beta*sqrt(p) + gamma*sqrt(q)`.
fn sign_of_two_surds(
    alpha: &BigRational,
    beta: &BigRational,
    p: &BigUint,
    gamma: &BigRational,
    q: &BigUint,
) -> i8 {
    if beta.is_zero() {
        return sign_of_surd(alpha, gamma, q);
    }
    if gamma.is_zero() || p == q {
        let beta = if p == q { beta + gamma } else { beta.clone() };
        return sign_of_surd(alpha, &beta, p);
    }
    // Compare u = alpha + beta*sqrt(p) against v = -gamma*sqrt(q).
    let su = sign_of_surd(alpha, beta, p);
    let sv = -rational_sign(gamma);
    if su != sv {
        return match su.cmp(&sv) {
            Ordering::Greater => 1,
            Ordering::Less => -1,
            Ordering::Equal => 0,
        };
    }
    if su == 0 {
        return 0;
    }
    // Same nonzero sign: compare squares, u^2 - v^2 = A + B*sqrt(p).
    let p_rat = BigRational::from_integer(BigInt::from(p.clone()));
    let q_rat = BigRational::from_integer(BigInt::from(q.clone()));
    let a_term = alpha * alpha + beta * beta * p_rat - gamma * gamma * q_rat;
    let b_term = BigRational::from_integer(2.into()) * alpha * beta;
    let cmp_squares = sign_of_surd(&a_term, &b_term, p);
    if su > 0 {
        cmp_squares
    } else {
        -cmp_squares
    }
}

fn rational_sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

/// Split `n` as `square^2 * free` with `free` squarefree.
pub fn split_square(n: &BigUint) -> (BigUint, BigUint) {
    if n.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    let mut remaining = n.clone();
    let mut square = BigUint::one();
    let mut free = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= remaining {
        if remaining.is_multiple_of(&p) {
            let mut count = 0u32;
            while remaining.is_multiple_of(&p) {
                remaining /= &p;
                count += 1;
            }
            square *= p.pow(count / 2);
            if count % 2 == 1 {
                free *= &p;
            }
        }
        p += 1u32;
    }
    if !remaining.is_one() {
        free *= remaining;
    }
    (square, free)
}

/// Exact rational square root, if one exists.
pub fn sqrt_exact(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let num = r.numer().magnitude().sqrt();
    let den = r.denom().magnitude().sqrt();
    let candidate = BigRational::new(BigInt::from(num), BigInt::from(den));
    (&candidate * &candidate == *r).then_some(candidate)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn surd_normalizes_square_part() {
        // sqrt(8) = 2*sqrt(2)
        let s = Scalar::sqrt_rational(&rat(8, 1)).unwrap();
        assert_eq!(s, Scalar::surd(rat(0, 1), rat(2, 1), 2u32.into()));
    }

    #[test]
    fn sqrt_of_perfect_square_is_rational() {
        let s = Scalar::sqrt_rational(&rat(9, 4)).unwrap();
        assert_eq!(s.as_rational(), Some(&rat(3, 2)));
    }

    #[test]
    fn mixed_radical_sum_is_rejected() {
        let s2 = Scalar::sqrt_rational(&rat(2, 1)).unwrap();
        let s3 = Scalar::sqrt_rational(&rat(3, 1)).unwrap();
        assert_eq!(s2.add(&s3), Err(ScalarError::MixedRadicals));
        // ... but the product merges: sqrt(2)*sqrt(3) = sqrt(6).
        let product = s2.mul(&s3).unwrap();
        assert_eq!(product, Scalar::surd(rat(0, 1), rat(1, 1), 6u32.into()));
    }

    #[test]
    fn conjugate_inverse() {
        // 1/(1 + sqrt(2)) = sqrt(2) - 1
        let v = Scalar::surd(rat(1, 1), rat(1, 1), 2u32.into());
        let inv = v.inverse().unwrap();
        assert_eq!(inv, Scalar::surd(rat(-1, 1), rat(1, 1), 2u32.into()));
        assert!(v.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn cross_radical_comparison() {
        let a = Scalar::surd(rat(1, 1), rat(1, 1), 2u32.into()); // 1 + sqrt(2) ~ 2.414
        let b = Scalar::sqrt_rational(&rat(5, 1)).unwrap(); // sqrt(5) ~ 2.236
        assert_eq!(a.cmp_value(&b), Ordering::Greater);
        assert_eq!(b.cmp_value(&a), Ordering::Less);
        let sqrt2 = Scalar::sqrt_rational(&rat(2, 1)).unwrap();
        let sqrt3 = Scalar::sqrt_rational(&rat(3, 1)).unwrap();
        assert_eq!(sqrt2.cmp_value(&sqrt3), Ordering::Less);
        assert_eq!(sqrt2.cmp_value(&sqrt2), Ordering::Equal);
    }

    #[test]
    fn signum_opposite_parts() {
        // 3 - 2*sqrt(2) > 0 (since 9 > 8); 2 - 2*sqrt(2) < 0.
        assert_eq!(Scalar::surd(rat(3, 1), rat(-2, 1), 2u32.into()).signum(), 1);
        assert_eq!(
            Scalar::surd(rat(2, 1), rat(-2, 1), 2u32.into()).signum(),
            -1
        );
        assert_eq!(Scalar::zero().signum(), 0);
    }
}
