//! Mathematical equivalence of expressions.
//!
//! Rational forms compare by cross-multiplied canonical forms; anything
//! outside that scope falls back to agreement at 8 random rational sample
//! points evaluated exactly (never in floating point). Equations compare
//! up to a nonzero rational scale of the canonicalized difference, and
//! solution sets compare as sets under pairwise equivalence.
//!
//! Equivalence is generic: domain restrictions are ignored, so `x^2/x`
//! and `x` are equivalent.

use std::collections::BTreeMap;

use num::{BigRational, Signed};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::canonical::{canonicalize, node_canonical, CanonicalForm};
use super::poly::Poly;
use super::scalar::Scalar;
use super::{Bound, Expr, ExprKind, Node, RelOp, SolutionItem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquivError {
    #[error("equivalence is indeterminate: only {found} of {needed} sample points were valid after {attempts} attempts")]
    Indeterminate {
        found: usize,
        needed: usize,
        attempts: usize,
    },
}

const SAMPLES_NEEDED: usize = 8;
const MAX_ATTEMPTS: usize = 400;
const SAMPLE_SEED: u64 = 0x0de1_1b3a;

/// True when the two inputs are mathematically equal.
pub fn is_equiv(a: &Expr, b: &Expr) -> Result<bool, EquivError> {
    match (a.kind(), b.kind()) {
        (ExprKind::Expression, ExprKind::Expression) => expr_equiv(a.root(), b.root()),
        (ExprKind::Equation, ExprKind::Equation) => Ok(equation_equiv(a, b)),
        (ExprKind::Inequation, ExprKind::Inequation) => Ok(inequation_equiv(a, b)),
        (ExprKind::SolutionSet, ExprKind::SolutionSet) => {
            let (Some(items_a), Some(items_b)) = (a.solution_items(), b.solution_items()) else {
                return Ok(false);
            };
            solution_sets_equiv(items_a, items_b)
        }
        _ => Ok(false),
    }
}

pub(crate) fn nodes_equiv(a: &Node, b: &Node) -> Result<bool, EquivError> {
    expr_equiv(a, b)
}

fn expr_equiv(a: &Node, b: &Node) -> Result<bool, EquivError> {
    match (node_canonical(a), node_canonical(b)) {
        (Ok(ca), Ok(cb)) => Ok(cross_equal(&ca, &cb)),
        _ => sampled_equiv(a, b),
    }
}

fn cross_equal(a: &CanonicalForm, b: &CanonicalForm) -> bool {
    let left = a.numerator().mul(b.denominator());
    let right = b.numerator().mul(a.denominator());
    match (left, right) {
        (Ok(l), Ok(r)) => l == r,
        _ => false,
    }
}

fn equation_equiv(a: &Expr, b: &Expr) -> bool {
    let (Ok(ca), Ok(cb)) = (canonicalize(a), canonicalize(b)) else {
        return false;
    };
    // An equation's content is the zero set of its numerator.
    proportional(ca.numerator(), cb.numerator()).is_some()
}

fn inequation_equiv(a: &Expr, b: &Expr) -> bool {
    let (Some(na), Some(nb)) = (normalized_inequation(a), normalized_inequation(b)) else {
        return false;
    };
    let (poly_a, strict_a) = na;
    let (poly_b, strict_b) = nb;
    if strict_a != strict_b {
        return false;
    }
    match proportional(&poly_a, &poly_b) {
        Some(scale) => scale.signum() > 0,
        None => false,
    }
}

/// Normalize an inequation to `p < 0` / `p <= 0` form, cross-multiplying
/// the denominator away (sound up to positive scaling, which is all the
/// comparison relies on).
fn normalized_inequation(e: &Expr) -> Option<(Poly, bool)> {
    let Node::Relation { op, .. } = e.root() else {
        return None;
    };
    let cf = canonicalize(e).ok()?;
    let num = cf.numerator().mul(cf.denominator()).ok()?;
    match op {
        RelOp::Lt => Some((num, true)),
        RelOp::Le => Some((num, false)),
        RelOp::Gt => Some((num.neg(), true)),
        RelOp::Ge => Some((num.neg(), false)),
        RelOp::Eq => None,
    }
}

/// `Some(scale)` when `a == scale * b` for a nonzero scalar.
fn proportional(a: &Poly, b: &Poly) -> Option<Scalar> {
    if a.is_zero() && b.is_zero() {
        return Some(Scalar::one());
    }
    if a.is_zero() || b.is_zero() {
        return None;
    }
    let (mono_a, lead_a) = a.leading()?;
    let (mono_b, lead_b) = b.leading()?;
    if mono_a != mono_b {
        return None;
    }
    let scale = lead_a.div(lead_b).ok()?;
    let scaled = b.mul_scalar(&scale).ok()?;
    (scaled == *a).then_some(scale)
}

fn solution_sets_equiv(a: &[SolutionItem], b: &[SolutionItem]) -> Result<bool, EquivError> {
    for item in a {
        if !has_match(item, b)? {
            return Ok(false);
        }
    }
    for item in b {
        if !has_match(item, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn has_match(item: &SolutionItem, pool: &[SolutionItem]) -> Result<bool, EquivError> {
    for candidate in pool {
        if items_equiv(item, candidate)? {
            return Ok(true);
        }
    }
    Ok(false)
}

fn items_equiv(a: &SolutionItem, b: &SolutionItem) -> Result<bool, EquivError> {
    match (a, b) {
        (
            SolutionItem::Binding { symbol: sa, value: va },
            SolutionItem::Binding { symbol: sb, value: vb },
        ) => {
            if sa != sb {
                return Ok(false);
            }
            expr_equiv(va, vb)
        }
        (
            SolutionItem::Interval {
                symbol: sa,
                lower: la,
                upper: ua,
            },
            SolutionItem::Interval {
                symbol: sb,
                lower: lb,
                upper: ub,
            },
        ) => {
            if sa != sb {
                return Ok(false);
            }
            Ok(bounds_equiv(la, lb)? && bounds_equiv(ua, ub)?)
        }
        (SolutionItem::AllReals { symbol: sa }, SolutionItem::AllReals { symbol: sb }) => {
            Ok(sa == sb)
        }
        _ => Ok(false),
    }
}

fn bounds_equiv(a: &Option<Bound>, b: &Option<Bound>) -> Result<bool, EquivError> {
    match (a, b) {
        (None, None) => Ok(true),
        (Some(ba), Some(bb)) => {
            if ba.inclusive != bb.inclusive {
                return Ok(false);
            }
            expr_equiv(&ba.value, &bb.value)
        }
        _ => Ok(false),
    }
}

// ---------------------------------------------------------------------
// Sampling fallback
// ---------------------------------------------------------------------

fn sampled_equiv(a: &Node, b: &Node) -> Result<bool, EquivError> {
    let mut symbols = std::collections::BTreeSet::new();
    a.collect_symbols(&mut symbols);
    b.collect_symbols(&mut symbols);
    let symbols: Vec<_> = symbols.into_iter().collect();

    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut found = 0usize;
    for _ in 0..MAX_ATTEMPTS {
        let mut assignment = BTreeMap::new();
        for sym in &symbols {
            let numer = loop {
                let n = rng.random_range(-12i64..=12);
                if n != 0 {
                    break n;
                }
            };
            let denom = rng.random_range(1i64..=4);
            let mut value = BigRational::new(numer.into(), denom.into());
            // Half the samples are perfect squares so radicands stay
            // exactly representable.
            if rng.random_bool(0.5) {
                value = &value * &value;
            }
            assignment.insert(sym.clone(), Scalar::from_rational(value));
        }
        let va = eval_exact(a, &assignment);
        let vb = eval_exact(b, &assignment);
        match (va, vb) {
            (Some(va), Some(vb)) => {
                if va != vb {
                    return Ok(false);
                }
                found += 1;
                if found >= SAMPLES_NEEDED {
                    return Ok(true);
                }
            }
            _ => continue,
        }
    }
    Err(EquivError::Indeterminate {
        found,
        needed: SAMPLES_NEEDED,
        attempts: MAX_ATTEMPTS,
    })
}

/// Exact evaluation at a rational assignment; `None` marks an invalid
/// sample (division by zero, irrational structure, non-integer power).
fn eval_exact(node: &Node, assignment: &BTreeMap<super::Symbol, Scalar>) -> Option<Scalar> {
    match node {
        Node::Rational(r) => Some(Scalar::from_rational(r.clone())),
        Node::Symbol(s) => assignment.get(s).cloned(),
        Node::Sum(terms) => {
            let mut acc = Scalar::zero();
            for t in terms {
                acc = acc.add(&eval_exact(t, assignment)?).ok()?;
            }
            Some(acc)
        }
        Node::Product(factors) => {
            let mut acc = Scalar::one();
            for t in factors {
                acc = acc.mul(&eval_exact(t, assignment)?).ok()?;
            }
            Some(acc)
        }
        Node::Neg(inner) => Some(eval_exact(inner, assignment)?.neg()),
        Node::Div(a, b) => {
            let den = eval_exact(b, assignment)?;
            if den.is_zero() {
                return None;
            }
            eval_exact(a, assignment)?.div(&den).ok()
        }
        Node::Power(base, exp) => {
            let e = eval_exact(exp, assignment)?;
            let e = e.as_rational()?;
            if !e.is_integer() {
                return None;
            }
            let magnitude: u32 = e.to_integer().abs().try_into().ok().filter(|m| *m <= 64)?;
            let base = eval_exact(base, assignment)?;
            let mut acc = Scalar::one();
            for _ in 0..magnitude {
                acc = acc.mul(&base).ok()?;
            }
            if e.is_negative() {
                acc.inverse().ok()
            } else {
                Some(acc)
            }
        }
        Node::Sqrt(inner) => {
            let v = eval_exact(inner, assignment)?;
            let r = v.as_rational()?;
            Scalar::sqrt_rational(r).ok()
        }
        Node::Relation { .. } | Node::Solutions(_) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;

    fn equiv(a: &str, b: &str) -> bool {
        is_equiv(&parse(a).unwrap(), &parse(b).unwrap())
            .unwrap_or_else(|e| panic!("is_equiv({a}, {b}): {e}"))
    }

    #[test]
    fn expansion_identity() {
        assert!(equiv("(x+1)^2", "x^2+2x+1"));
        assert!(!equiv("(x+1)^2", "x^2+2x+2"));
    }

    #[test]
    fn equations_are_scale_invariant() {
        assert!(equiv("2x-2=0", "x=1"));
        assert!(equiv("3y-3=3", "y-1=1"));
        assert!(!equiv("2x-2=0", "x=2"));
        // Scale invariance does not cross the equation/expression divide.
        assert!(!equiv("2x-2=0", "x-1"));
    }

    #[test]
    fn solution_sets_compare_as_sets() {
        assert!(equiv("[x=1, x=-1]", "[x=-1, x=1]"));
        assert!(!equiv("[x=1]", "[x=2]"));
        assert!(!equiv("[x=1]", "[y=1]"));
        assert!(equiv("[1<x<3]", "[1<x<3]"));
        assert!(!equiv("[1<x<3]", "[1<=x<3]"));
        assert!(equiv("[]", "[]"));
    }

    #[test]
    fn rational_functions_cross_multiply() {
        assert!(equiv("\\frac{x^2-1}{x-1}", "x+1"));
        assert!(equiv("\\frac{x^2}{x}", "x"));
        assert!(!equiv("\\frac{x^2+1}{x}", "x"));
    }

    #[test]
    fn inequations_respect_direction() {
        assert!(equiv("2x-4>0", "x>2"));
        assert!(equiv("2x-4>0", "4-2x<0"));
        assert!(!equiv("2x-4>0", "x<2"));
        assert!(!equiv("x>2", "x>=2"));
    }

    #[test]
    fn sampling_handles_radicals() {
        assert!(equiv("\\sqrt{x}\\sqrt{x}", "x"));
        assert!(!equiv("\\sqrt{x}", "x"));
        assert!(equiv("\\sqrt{x}\\sqrt{y}", "\\sqrt{y}\\sqrt{x}"));
    }

    #[test]
    fn surd_constants() {
        assert!(equiv("\\sqrt{8}", "2\\sqrt{2}"));
        assert!(equiv("(1+\\sqrt{2})^2", "3+2\\sqrt{2}"));
        assert!(!equiv("\\sqrt{2}", "\\sqrt{3}"));
    }

    #[test]
    fn reflexive_and_symmetric_on_samples() {
        for text in ["x^2+2x+1", "\\sqrt{x}+1", "\\frac{x}{y}"] {
            assert!(equiv(text, text), "reflexivity for {text}");
        }
        assert_eq!(equiv("(x+y)^2", "x^2+2xy+y^2"), equiv("x^2+2xy+y^2", "(x+y)^2"));
    }
}
