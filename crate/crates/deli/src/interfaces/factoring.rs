//! Polynomial factoring over the rationals: content and monomial
//! extraction, rational-root extraction with multiplicity, quadratic
//! splitting by discriminant, and shared-coefficient extraction for
//! multivariate inputs. Factoring is conservative: anything it cannot
//! split stays as one factor, so the product always reproduces the input.

use num::bigint::BigInt;
use num::{BigRational, Integer, One, Signed, Zero};

use crate::expr::poly::{poly_gcd, Mono, Poly};
use crate::expr::scalar::Scalar;
use crate::expr::Symbol;

use super::InterfaceError;

#[derive(Debug, Clone)]
pub struct Factored {
    pub content: Scalar,
    /// Primitive factors with positive leading coefficients, paired with
    /// multiplicities.
    pub factors: Vec<(Poly, u32)>,
}

impl Factored {
    fn push(&mut self, factor: Poly, multiplicity: u32) {
        for (existing, count) in &mut self.factors {
            if *existing == factor {
                *count += multiplicity;
                return;
            }
        }
        self.factors.push((factor, multiplicity));
    }

    fn sort(&mut self) {
        self.factors
            .sort_by_key(|(p, _)| (p.total_degree(), p.to_string()));
    }
}

/// Upper bound on divisor-pair candidates for the rational root hunt;
/// beyond it the polynomial is left unsplit rather than ground through.
const MAX_ROOT_CANDIDATES: usize = 4096;

pub fn factor_poly(input: &Poly) -> Result<Factored, InterfaceError> {
    let mut out = Factored {
        content: Scalar::one(),
        factors: Vec::new(),
    };
    if input.is_zero() {
        out.content = Scalar::zero();
        return Ok(out);
    }
    if !input.has_rational_coeffs() {
        // Exact surd coefficients stay unsplit.
        out.push(input.clone(), 1);
        return Ok(out);
    }

    // Rational content and sign.
    let mut content = input.rational_content().expect("rational coefficients");
    if input.leading().map(|(_, c)| c.signum()) == Some(-1) {
        content = -content;
    }
    out.content = Scalar::from_rational(content.clone());
    let mut p = input
        .div_scalar(&Scalar::from_rational(content))
        .expect("nonzero content");

    // Monomial content.
    for symbol in p.vars() {
        let min_exp = p
            .terms_desc()
            .map(|(m, _)| m.exponent_of(&symbol))
            .min()
            .unwrap_or(0);
        if min_exp > 0 {
            let mono = Poly::monomial(Mono::var(symbol.clone(), min_exp), Scalar::one());
            p = p
                .divide_exact(&mono)
                .expect("rational arithmetic")
                .expect("monomial content divides");
            out.push(Poly::symbol(symbol.clone()), min_exp);
        }
    }

    factor_primitive(&p, 1, &mut out)?;
    out.sort();
    Ok(out)
}

fn factor_primitive(p: &Poly, multiplicity: u32, out: &mut Factored) -> Result<(), InterfaceError> {
    if let Some(c) = p.constant_value() {
        // Content extraction leaves 1 here, but stay safe.
        if !c.is_one() {
            out.content = out
                .content
                .mul(&c)
                .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
        }
        return Ok(());
    }
    let vars: Vec<Symbol> = p.vars().into_iter().collect();
    if vars.len() == 1 {
        return factor_univariate(p, &vars[0], multiplicity, out);
    }

    // Shared polynomial coefficient across the powers of some variable,
    // e.g. a*y + 2b*y - a - 2b = (a + 2b)(y - 1).
    for var in &vars {
        let coeffs = p.coeffs_in(var);
        let nonzero: Vec<&Poly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
        if nonzero.len() < 2 {
            continue;
        }
        let mut g = nonzero[0].clone();
        for c in &nonzero[1..] {
            g = poly_gcd(&g, c);
            if g.is_constant() {
                break;
            }
        }
        if !g.is_constant() {
            let quotient = p
                .divide_exact(&g)
                .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?
                .expect("gcd of coefficients divides");
            factor_primitive(&g, multiplicity, out)?;
            factor_primitive(&quotient, multiplicity, out)?;
            return Ok(());
        }
    }

    // Quadratic in one variable with a constant leading coefficient:
    // split via the discriminant when it is a perfect square.
    for var in &vars {
        if p.degree_in(var) != 2 {
            continue;
        }
        let coeffs = p.coeffs_in(var);
        let Some(a) = coeffs[2].constant_value() else {
            continue;
        };
        let b = coeffs.get(1).cloned().unwrap_or_else(Poly::zero);
        let c = coeffs[0].clone();
        let four_a = Poly::constant(
            a.mul(&Scalar::from_int(4))
                .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?,
        );
        let disc = (|| -> Result<Poly, crate::expr::scalar::ScalarError> {
            b.mul(&b)?.sub(&c.mul(&four_a)?)
        })()
        .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
        let Some(s) = disc.sqrt_exact() else {
            continue;
        };
        // p = a (v - r1)(v - r2) with r_{1,2} = (-b ± s) / (2a).
        let two_a = Scalar::from_int(2)
            .mul(&a)
            .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
        let build_root = |sign_plus: bool| -> Result<Poly, InterfaceError> {
            let numer = if sign_plus {
                b.neg().add(&s).map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?
            } else {
                b.neg().sub(&s).map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?
            };
            numer
                .div_scalar(&two_a)
                .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))
        };
        let r1 = build_root(true)?;
        let r2 = build_root(false)?;
        let v = Poly::symbol(var.clone());
        let f1 = v
            .sub(&r1)
            .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
        let f2 = v
            .sub(&r2)
            .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
        let product = f1
            .mul(&f2)
            .and_then(|q| q.mul_scalar(&a))
            .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
        if product == *p {
            out.content = out
                .content
                .mul(&a)
                .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
            absorb_normalized(f1, multiplicity, out)?;
            absorb_normalized(f2, multiplicity, out)?;
            return Ok(());
        }
    }

    out.push(p.clone(), multiplicity);
    Ok(())
}

/// Push a factor after re-normalizing to integer-primitive form, folding
/// the scale into the content.
fn absorb_normalized(
    factor: Poly,
    multiplicity: u32,
    out: &mut Factored,
) -> Result<(), InterfaceError> {
    let mut content = factor.rational_content().expect("rational coefficients");
    if factor.leading().map(|(_, c)| c.signum()) == Some(-1) {
        content = -content;
    }
    let primitive = factor
        .div_scalar(&Scalar::from_rational(content.clone()))
        .expect("nonzero content");
    for _ in 0..multiplicity {
        out.content = out
            .content
            .mul(&Scalar::from_rational(content.clone()))
            .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
    }
    out.push(primitive, multiplicity);
    Ok(())
}

fn factor_univariate(
    p: &Poly,
    var: &Symbol,
    multiplicity: u32,
    out: &mut Factored,
) -> Result<(), InterfaceError> {
    let mut remaining = p.clone();

    if remaining.degree_in(var) > 1 {
        for root in rational_root_candidates(&remaining, var) {
            loop {
                let v = Poly::symbol(var.clone());
                let linear = v
                    .sub(&Poly::from_rational(root.clone()))
                    .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
                match remaining
                    .divide_exact(&linear)
                    .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?
                {
                    Some(quotient) => {
                        absorb_normalized(linear, multiplicity, out)?;
                        remaining = quotient;
                    }
                    None => break,
                }
            }
            if remaining.degree_in(var) <= 1 {
                break;
            }
        }
    }

    match remaining.degree_in(var) {
        0 => {
            let c = remaining.constant_value().expect("degree zero");
            if !c.is_one() {
                out.content = out
                    .content
                    .mul(&c)
                    .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
            }
            Ok(())
        }
        1 => absorb_normalized(remaining, multiplicity, out),
        2 => {
            // Rational roots are gone; a square discriminant can only
            // appear here if the candidate scan was capped.
            let coeffs = remaining.coeffs_in(var);
            let a = coeffs[2].constant_value().expect("univariate");
            let b = coeffs[1].constant_value().expect("univariate");
            let c = coeffs[0].constant_value().expect("univariate");
            let disc = (|| b.mul(&b)?.sub(&Scalar::from_int(4).mul(&a)?.mul(&c)?))()
                .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
            let square_root = disc
                .as_rational()
                .and_then(crate::expr::scalar::sqrt_exact);
            if let Some(s) = square_root {
                let two_a = Scalar::from_int(2)
                    .mul(&a)
                    .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
                let v = Poly::symbol(var.clone());
                for sign in [1i64, -1] {
                    let s_signed = Scalar::from_rational(if sign > 0 { s.clone() } else { -s.clone() });
                    let root = (|| b.neg().add(&s_signed)?.div(&two_a))()
                        .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
                    let linear = v
                        .sub(&Poly::constant(root))
                        .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
                    absorb_normalized(linear, multiplicity, out)?;
                }
                out.content = out
                    .content
                    .mul(&a)
                    .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
                Ok(())
            } else {
                absorb_normalized(remaining, multiplicity, out)
            }
        }
        _ => absorb_normalized(remaining, multiplicity, out),
    }
}

/// Candidate rational roots p/q: p divides the constant term, q divides
/// the leading coefficient (both over the integer-primitive form).
fn rational_root_candidates(p: &Poly, var: &Symbol) -> Vec<BigRational> {
    let coeffs = p.coeffs_in(var);
    let lowest = coeffs
        .iter()
        .find(|c| !c.is_zero())
        .and_then(Poly::constant_value)
        .and_then(|s| s.as_rational().cloned());
    let highest = coeffs
        .last()
        .and_then(Poly::constant_value)
        .and_then(|s| s.as_rational().cloned());
    let (Some(lowest), Some(highest)) = (lowest, highest) else {
        return Vec::new();
    };
    // Scale to integers: candidates are unaffected by a common factor.
    let scale = BigInt::from(lowest.denom().lcm(highest.denom()));
    let a0 = (lowest * BigRational::from_integer(scale.clone()))
        .to_integer()
        .magnitude()
        .clone();
    let an = (highest * BigRational::from_integer(scale))
        .to_integer()
        .magnitude()
        .clone();
    let ps = divisors_capped(&BigInt::from(a0));
    let qs = divisors_capped(&BigInt::from(an));
    let (Some(ps), Some(qs)) = (ps, qs) else {
        return Vec::new();
    };
    if ps.len().saturating_mul(qs.len()) > MAX_ROOT_CANDIDATES {
        return Vec::new();
    }
    let mut candidates = Vec::new();
    for p_div in &ps {
        for q_div in &qs {
            let base = BigRational::new(p_div.clone(), q_div.clone());
            for value in [base.clone(), -base] {
                if !candidates.contains(&value) {
                    candidates.push(value);
                }
            }
        }
    }
    candidates
}

fn divisors_capped(n: &BigInt) -> Option<Vec<BigInt>> {
    let n = n.magnitude();
    if n.is_zero() {
        return Some(vec![BigInt::one()]);
    }
    if *n > num::BigUint::from(1_000_000_000_000u64) {
        return None;
    }
    let n: u64 = n.try_into().ok()?;
    let mut divisors = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            divisors.push(BigInt::from(d));
            if d != n / d {
                divisors.push(BigInt::from(n / d));
            }
        }
        if divisors.len() > MAX_ROOT_CANDIDATES {
            return None;
        }
        d += 1;
    }
    divisors.sort();
    Some(divisors)
}
