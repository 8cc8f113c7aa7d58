//! Canonical forms: a fully expanded numerator/denominator pair with
//! graded-lex sorted monomials. Two polynomial expressions are equal
//! exactly when their canonical forms coincide; rational forms are
//! compared by cross-multiplication in [`super::equiv`].

use num::{BigRational, One, Signed, Zero};
use thiserror::Error;

use super::poly::{Mono, Poly};
use super::scalar::{Scalar, ScalarError};
use super::{Expr, Node};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error("not a polynomial or ratio of polynomials: {0}")]
    NonRationalForm(String),
    #[error("division by zero")]
    DivisionByZero,
}

impl From<ScalarError> for CanonError {
    fn from(e: ScalarError) -> CanonError {
        match e {
            ScalarError::DivisionByZero => CanonError::DivisionByZero,
            ScalarError::MixedRadicals => {
                CanonError::NonRationalForm("distinct radicals cannot be combined".into())
            }
            ScalarError::NegativeRadicand => {
                CanonError::NonRationalForm("square root of a negative value".into())
            }
        }
    }
}

/// Expanded `numerator / denominator`. The denominator is monic under
/// graded-lex and equals 1 for polynomial inputs; no cancellation beyond
/// constant folding is performed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    numerator: Poly,
    denominator: Poly,
}

impl CanonicalForm {
    pub fn numerator(&self) -> &Poly {
        &self.numerator
    }

    pub fn denominator(&self) -> &Poly {
        &self.denominator
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.is_one()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn normalized(numerator: Poly, denominator: Poly) -> Result<CanonicalForm, CanonError> {
        if denominator.is_zero() {
            return Err(CanonError::DivisionByZero);
        }
        if let Some(c) = denominator.constant_value() {
            return Ok(CanonicalForm {
                numerator: numerator.div_scalar(&c)?,
                denominator: Poly::one(),
            });
        }
        let lead = denominator
            .leading()
            .map(|(_, c)| c.clone())
            .expect("nonzero denominator");
        Ok(CanonicalForm {
            numerator: numerator.div_scalar(&lead)?,
            denominator: denominator.div_scalar(&lead)?,
        })
    }
}

/// Canonicalize an expression; equations and inequations canonicalize
/// their `lhs - rhs` difference.
pub fn canonicalize(expr: &Expr) -> Result<CanonicalForm, CanonError> {
    match expr.root() {
        Node::Relation { lhs, rhs, .. } => {
            let (ln, ld) = node_fraction(lhs)?;
            let (rn, rd) = node_fraction(rhs)?;
            // lhs - rhs = (ln*rd - rn*ld) / (ld*rd)
            let num = ln.mul(&rd)?.sub(&rn.mul(&ld)?)?;
            let den = ld.mul(&rd)?;
            CanonicalForm::normalized(num, den)
        }
        Node::Solutions(_) => Err(CanonError::NonRationalForm(
            "a solution set has no canonical rational form".into(),
        )),
        node => {
            let (num, den) = node_fraction(node)?;
            CanonicalForm::normalized(num, den)
        }
    }
}

/// Canonicalize a plain (relation-free) node into a normalized fraction.
pub(crate) fn node_canonical(node: &Node) -> Result<CanonicalForm, CanonError> {
    let (num, den) = node_fraction(node)?;
    CanonicalForm::normalized(num, den)
}

const MAX_EXPONENT: u32 = 256;

fn node_fraction(node: &Node) -> Result<(Poly, Poly), CanonError> {
    match node {
        Node::Rational(r) => Ok((Poly::from_rational(r.clone()), Poly::one())),
        Node::Symbol(s) => Ok((Poly::symbol(s.clone()), Poly::one())),
        Node::Sum(terms) => {
            let mut num = Poly::zero();
            let mut den = Poly::one();
            for term in terms {
                let (tn, td) = node_fraction(term)?;
                num = num.mul(&td)?.add(&tn.mul(&den)?)?;
                den = den.mul(&td)?;
            }
            Ok((num, den))
        }
        Node::Product(factors) => {
            let mut num = Poly::one();
            let mut den = Poly::one();
            for factor in factors {
                let (fn_, fd) = node_fraction(factor)?;
                num = num.mul(&fn_)?;
                den = den.mul(&fd)?;
            }
            Ok((num, den))
        }
        Node::Neg(inner) => {
            let (n, d) = node_fraction(inner)?;
            Ok((n.neg(), d))
        }
        Node::Div(a, b) => {
            let (an, ad) = node_fraction(a)?;
            let (bn, bd) = node_fraction(b)?;
            if bn.is_zero() {
                return Err(CanonError::DivisionByZero);
            }
            Ok((an.mul(&bd)?, ad.mul(&bn)?))
        }
        Node::Power(base, exponent) => {
            let exp = node_canonical(exponent)?;
            if !exp.is_polynomial() {
                return Err(CanonError::NonRationalForm("non-constant exponent".into()));
            }
            let Some(value) = exp.numerator().constant_value() else {
                return Err(CanonError::NonRationalForm("non-constant exponent".into()));
            };
            let Some(rat) = value.as_rational().cloned() else {
                return Err(CanonError::NonRationalForm("irrational exponent".into()));
            };
            if !rat.is_integer() {
                return Err(CanonError::NonRationalForm("fractional exponent".into()));
            }
            let magnitude = rat.to_integer().abs();
            if magnitude > MAX_EXPONENT.into() {
                return Err(CanonError::NonRationalForm("exponent too large".into()));
            }
            let e: u32 = magnitude.try_into().expect("bounded above");
            let (bn, bd) = node_fraction(base)?;
            if rat.is_negative() {
                let num = bn.pow(e)?;
                if num.is_zero() {
                    return Err(CanonError::DivisionByZero);
                }
                Ok((bd.pow(e)?, num))
            } else {
                // 0^0 canonicalizes to 1 by the usual convention.
                Ok((bn.pow(e)?, bd.pow(e)?))
            }
        }
        Node::Sqrt(radicand) => {
            let inner = node_canonical(radicand)?;
            if let (Some(n), Some(d)) = (
                inner.numerator().constant_value(),
                inner.denominator().constant_value(),
            ) {
                let value = n.div(&d)?;
                let Some(rat) = value.as_rational() else {
                    return Err(CanonError::NonRationalForm(
                        "nested radicals are out of scope".into(),
                    ));
                };
                let root = Scalar::sqrt_rational(rat)?;
                return Ok((Poly::constant(root), Poly::one()));
            }
            // sqrt(n/d) = sqrt(n*d)/d, defined here only when n*d is a
            // perfect square polynomial.
            let m = inner.numerator().mul(inner.denominator())?;
            match m.sqrt_exact() {
                Some(root) => Ok((root, inner.denominator().clone())),
                None => Err(CanonError::NonRationalForm(
                    "radicand is not a perfect square".into(),
                )),
            }
        }
        Node::Relation { .. } => Err(CanonError::NonRationalForm(
            "nested relation has no rational form".into(),
        )),
        Node::Solutions(_) => Err(CanonError::NonRationalForm(
            "a solution set has no canonical rational form".into(),
        )),
    }
}

/// Render a polynomial back to AST form: monomials in descending
/// graded-lex order, matching the shapes the parser produces.
pub fn poly_to_node(poly: &Poly) -> Node {
    if poly.is_zero() {
        return Node::int(0);
    }
    let terms: Vec<Node> = poly
        .terms_desc()
        .map(|(mono, coeff)| term_to_node(mono, coeff))
        .collect();
    Node::sum(terms)
}

fn term_to_node(mono: &Mono, coeff: &Scalar) -> Node {
    let (negated, magnitude) = match coeff.as_rational() {
        Some(r) if r.is_negative() => (true, Scalar::from_rational(-r.clone())),
        _ => (false, coeff.clone()),
    };
    let mut factors = Vec::new();
    if !magnitude.is_one() || mono.is_one() {
        factors.push(scalar_to_node(&magnitude));
    }
    for (sym, exp) in mono.pairs() {
        let base = Node::Symbol(sym.clone());
        factors.push(if *exp == 1 {
            base
        } else {
            Node::power(base, Node::int(*exp as i64))
        });
    }
    let term = Node::product(factors);
    if negated {
        Node::neg(term)
    } else {
        term
    }
}

/// Render an exact scalar as AST: `a + b*sqrt(d)`.
pub fn scalar_to_node(value: &Scalar) -> Node {
    if let Some(r) = value.as_rational() {
        return Node::Rational(r.clone());
    }
    let (b, d) = value.surd_part();
    let root = Node::sqrt(Node::Rational(BigRational::from_integer(
        num::bigint::BigInt::from(d.clone()),
    )));
    let surd_term = if b.is_one() {
        root
    } else if (-b).is_one() {
        Node::neg(root)
    } else if b.is_negative() {
        Node::neg(Node::product(vec![
            Node::Rational(-b.clone()),
            root,
        ]))
    } else {
        Node::product(vec![Node::Rational(b.clone()), root])
    };
    let a = value.rational_part();
    if a.is_zero() {
        surd_term
    } else {
        Node::sum(vec![Node::Rational(a.clone()), surd_term])
    }
}

/// Render a canonical form back to an expression.
pub fn canonical_to_expr(cf: &CanonicalForm) -> Expr {
    Expr::from_node(canonical_to_node(cf))
}

pub(crate) fn canonical_to_node(cf: &CanonicalForm) -> Node {
    if cf.is_polynomial() {
        poly_to_node(cf.numerator())
    } else {
        Node::div(poly_to_node(cf.numerator()), poly_to_node(cf.denominator()))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn canon(text: &str) -> CanonicalForm {
        canonicalize(&parse(text).unwrap()).unwrap()
    }

    #[test]
    fn binomial_square_expands() {
        let cf = canon("(x+1)^2");
        assert!(cf.is_polynomial());
        assert_eq!(cf, canon("x^2 + 2x + 1"));
        assert_eq!(poly_to_node(cf.numerator()), parse("x^2 + 2x + 1").unwrap().into_root());
    }

    #[test]
    fn rational_form_keeps_denominator() {
        let cf = canon("\\frac{x^2-1}{x-1}");
        assert!(!cf.is_polynomial());
        assert_eq!(cf.numerator(), canon("x^2-1").numerator());
        assert_eq!(cf.denominator(), canon("x-1").numerator());
    }

    #[test]
    fn equation_canonicalizes_difference() {
        let cf = canon("a + 2b = 3");
        assert!(cf.is_polynomial());
        assert_eq!(cf, canon("a + 2b - 3"));
    }

    #[test]
    fn constant_denominator_folds_into_numerator() {
        assert_eq!(canon("\\frac{x+1}{2}"), canon("\\frac{1}{2}x + \\frac{1}{2}"));
    }

    #[test]
    fn surd_constants_are_exact() {
        let cf = canon("\\sqrt{8}");
        let expected = Poly::constant(Scalar::surd(
            BigRational::zero(),
            BigRational::from_integer(2.into()),
            2u32.into(),
        ));
        assert_eq!(cf.numerator(), &expected);
        // (sqrt(2))^2 folds back to 2.
        assert_eq!(canon("\\sqrt{2}^2"), canon("2"));
    }

    #[test]
    fn perfect_square_radicand_of_polynomial() {
        assert_eq!(canon("\\sqrt{x^2 + 2x + 1}"), canon("x + 1"));
        let err = canonicalize(&parse("\\sqrt{x}").unwrap()).unwrap_err();
        assert!(matches!(err, CanonError::NonRationalForm(_)));
    }

    #[test]
    fn no_zero_coefficients_survive() {
        let cf = canon("(x+1)(x-1) - x^2");
        assert_eq!(cf.numerator(), &Poly::from_int(-1));
        assert_eq!(cf.numerator().term_count(), 1);
    }

    #[test]
    fn division_by_zero_constant() {
        assert_eq!(
            canonicalize(&parse("\\frac{1}{0}").unwrap()),
            Err(CanonError::DivisionByZero)
        );
    }
}
