//! Numerical-computation and expression-transformation interfaces.

use std::collections::BTreeMap;

use num::{One, Signed};

use crate::expr::canonical::{canonical_to_node, node_canonical, poly_to_node, scalar_to_node};
use crate::expr::poly::Poly;
use crate::expr::scalar::Scalar;
use crate::expr::{CanonError, Expr, ExprKind, Node, Symbol};

use super::factoring::{factor_poly, Factored};
use super::InterfaceError;

impl From<CanonError> for InterfaceError {
    fn from(e: CanonError) -> InterfaceError {
        InterfaceError::NonRationalForm(e.to_string())
    }
}

/// Exact value of a closed expression.
pub fn calculate(e: &Expr) -> Result<Expr, InterfaceError> {
    if e.kind() != ExprKind::Expression {
        return Err(InterfaceError::NonRationalForm(
            "calculate takes a value expression, not an equation or a set; \
             use solve_eq to solve an equation"
                .into(),
        ));
    }
    let symbols = e.free_symbols();
    if !symbols.is_empty() {
        return Err(InterfaceError::NonNumeric { symbols });
    }
    let cf = node_canonical(e.root())?;
    let numer = cf
        .numerator()
        .constant_value()
        .expect("no free symbols, so the form is constant");
    let denom = cf
        .denominator()
        .constant_value()
        .expect("no free symbols, so the form is constant");
    let value = numer
        .div(&denom)
        .map_err(|e| InterfaceError::NonRationalForm(e.to_string()))?;
    Ok(Expr::from_node(scalar_to_node(&value)))
}

/// Simultaneous substitution of symbol bindings followed by
/// expansion-based simplification.
pub fn substitute(e: &Expr, conditions: &[Expr]) -> Result<Expr, InterfaceError> {
    let mut bindings: BTreeMap<Symbol, Node> = BTreeMap::new();
    for condition in conditions {
        let Node::Relation { op, lhs, rhs } = condition.root() else {
            return Err(InterfaceError::BadCondition(format!(
                "`{condition}` is not an equation"
            )));
        };
        if !op.is_equality() {
            return Err(InterfaceError::BadCondition(format!(
                "`{condition}` is an inequality"
            )));
        }
        let Node::Symbol(symbol) = lhs.as_ref() else {
            return Err(InterfaceError::BadCondition(format!(
                "the left side of `{condition}` is not a symbol"
            )));
        };
        if bindings
            .insert(symbol.clone(), rhs.as_ref().clone())
            .is_some()
        {
            return Err(InterfaceError::BadCondition(format!(
                "the symbol {symbol} is bound more than once"
            )));
        }
    }
    let substituted = e.root().substitute_symbols(&bindings);
    Ok(simplify_node(substituted))
}

/// Expansion-based simplification; inputs outside rational scope are
/// returned as substituted.
fn simplify_node(node: Node) -> Expr {
    let simplified = match &node {
        Node::Relation { op, lhs, rhs } => {
            let simplify_side =
                |side: &Node| node_canonical(side).map(|cf| canonical_to_node(&cf));
            match (simplify_side(lhs), simplify_side(rhs)) {
                (Ok(l), Ok(r)) => Some(Node::relation(*op, l, r)),
                _ => None,
            }
        }
        Node::Solutions(_) => None,
        other => node_canonical(other).ok().map(|cf| canonical_to_node(&cf)),
    };
    Expr::from_node(simplified.unwrap_or(node))
}

/// Fully expanded sum of monomials; equations and inequations expand
/// each side.
pub fn expand(e: &Expr) -> Result<Expr, InterfaceError> {
    match e.root() {
        Node::Relation { op, lhs, rhs } => {
            let l = canonical_to_node(&node_canonical(lhs)?);
            let r = canonical_to_node(&node_canonical(rhs)?);
            Ok(Expr::from_node(Node::relation(*op, l, r)))
        }
        Node::Solutions(_) => Err(InterfaceError::NonRationalForm(
            "expand takes an expression or an equation, not a solution set".into(),
        )),
        other => {
            let cf = node_canonical(other)?;
            Ok(Expr::from_node(canonical_to_node(&cf)))
        }
    }
}

/// Factor into rational-coefficient factors; equations factor each side.
pub fn factor(e: &Expr) -> Result<Expr, InterfaceError> {
    match e.root() {
        Node::Relation { op, lhs, rhs } => {
            let l = factor_side(lhs)?;
            let r = factor_side(rhs)?;
            Ok(Expr::from_node(Node::relation(*op, l, r)))
        }
        Node::Solutions(_) => Err(InterfaceError::NonPolynomial(
            "factor takes a polynomial, not a solution set".into(),
        )),
        other => Ok(Expr::from_node(factor_side(other)?)),
    }
}

fn factor_side(node: &Node) -> Result<Node, InterfaceError> {
    let cf = node_canonical(node)?;
    if !cf.is_polynomial() {
        return Err(InterfaceError::NonPolynomial(format!(
            "`{}` has a symbolic denominator",
            Expr::from_node(node.clone())
        )));
    }
    let factored = factor_poly(cf.numerator())?;
    Ok(factored_to_node(&factored))
}

pub(super) fn factored_to_node(factored: &Factored) -> Node {
    if factored.content.is_zero() {
        return Node::int(0);
    }
    let mut factors: Vec<Node> = Vec::new();
    let (negated, magnitude) = match factored.content.as_rational() {
        Some(r) if r < &num::BigRational::from_integer(0.into()) => {
            (true, Scalar::from_rational(-r.clone()))
        }
        _ => (false, factored.content.clone()),
    };
    if !magnitude.is_one() || factored.factors.is_empty() {
        factors.push(scalar_to_node(&magnitude));
    }
    for (poly, multiplicity) in &factored.factors {
        let base = poly_to_node(poly);
        factors.push(if *multiplicity == 1 {
            base
        } else {
            Node::power(base, Node::int(*multiplicity as i64))
        });
    }
    let node = Node::product(factors);
    if negated {
        Node::neg(node)
    } else {
        node
    }
}

/// Collect as a polynomial in `symbol`, factoring the coefficient of each
/// power; equations collect each side.
pub fn collect(e: &Expr, symbol: &Symbol) -> Result<Expr, InterfaceError> {
    match e.root() {
        Node::Relation { op, lhs, rhs } => {
            let l = collect_side(lhs, symbol)?;
            let r = collect_side(rhs, symbol)?;
            Ok(Expr::from_node(Node::relation(*op, l, r)))
        }
        Node::Solutions(_) => Err(InterfaceError::NonPolynomial(
            "collect takes a polynomial, not a solution set".into(),
        )),
        other => Ok(Expr::from_node(collect_side(other, symbol)?)),
    }
}

fn collect_side(node: &Node, symbol: &Symbol) -> Result<Node, InterfaceError> {
    let cf = node_canonical(node)?;
    if !cf.is_polynomial() {
        return Err(InterfaceError::NonPolynomial(format!(
            "`{}` is not a polynomial in {symbol}",
            Expr::from_node(node.clone())
        )));
    }
    let poly = cf.numerator();
    if poly.degree_in(symbol) == 0 {
        return Ok(poly_to_node(poly));
    }
    let coeffs = poly.coeffs_in(symbol);
    let mut terms = Vec::new();
    for (degree, coeff) in coeffs.iter().enumerate().rev() {
        if coeff.is_zero() {
            continue;
        }
        let power = match degree {
            0 => None,
            1 => Some(Node::Symbol(symbol.clone())),
            d => Some(Node::power(Node::Symbol(symbol.clone()), Node::int(d as i64))),
        };
        let coeff_node = factor_poly(coeff)
            .map(|f| factored_to_node(&f))
            .unwrap_or_else(|_| poly_to_node(coeff));
        let term = match power {
            None => coeff_node,
            Some(power) => match coeff_node {
                Node::Rational(r) if r.is_one() => power,
                Node::Neg(inner) => {
                    Node::neg(append_factor(*inner, power))
                }
                other => append_factor(other, power),
            },
        };
        terms.push(term);
    }
    Ok(Node::sum(terms))
}

fn append_factor(node: Node, factor: Node) -> Node {
    match node {
        Node::Rational(r) if r.is_one() => factor,
        Node::Product(mut v) => {
            v.push(factor);
            Node::Product(v)
        }
        other => Node::product(vec![other, factor]),
    }
}

/// Rewrite a univariate quadratic `ax^2 + bx + c` as
/// `a(x + b/2a)^2 + (c - b^2/4a)`.
pub fn complete_the_square(e: &Expr) -> Result<Expr, InterfaceError> {
    if e.kind() != ExprKind::Expression {
        return Err(InterfaceError::NotQuadratic(
            "the input is not a plain expression".into(),
        ));
    }
    let cf = node_canonical(e.root())?;
    if !cf.is_polynomial() {
        return Err(InterfaceError::NotQuadratic(
            "the input has a symbolic denominator".into(),
        ));
    }
    let poly = cf.numerator();
    let vars: Vec<Symbol> = poly.vars().into_iter().collect();
    if vars.len() != 1 {
        return Err(InterfaceError::NotQuadratic(format!(
            "expected one symbol, found {}",
            vars.len()
        )));
    }
    let x = &vars[0];
    if poly.degree_in(x) != 2 {
        return Err(InterfaceError::NotQuadratic(format!(
            "the degree in {x} is {}, not 2",
            poly.degree_in(x)
        )));
    }
    let coeffs = poly.coeffs_in(x);
    let a = coeffs[2].constant_value().expect("univariate quadratic");
    let b = coeffs[1].constant_value().expect("univariate quadratic");
    let c = coeffs[0].constant_value().expect("univariate quadratic");

    let scalar_err = |e: crate::expr::scalar::ScalarError| InterfaceError::NonRationalForm(e.to_string());
    let two_a = Scalar::from_int(2).mul(&a).map_err(scalar_err)?;
    let shift = b.div(&two_a).map_err(scalar_err)?; // b / 2a
    let offset = c
        .sub(&b.mul(&b).map_err(scalar_err)?.div(
            &Scalar::from_int(4).mul(&a).map_err(scalar_err)?,
        )
        .map_err(scalar_err)?)
        .map_err(scalar_err)?; // c - b^2/4a

    let inner = if shift.is_zero() {
        Node::Symbol(x.clone())
    } else {
        Node::sum(vec![Node::Symbol(x.clone()), scalar_to_node(&shift)])
    };
    let square = Node::power(inner, Node::int(2));
    let leading = match a.as_rational() {
        Some(r) if r.is_one() => square,
        Some(r) if (-r).is_one() => Node::neg(square),
        _ => Node::product(vec![scalar_to_node(&a), square]),
    };
    let result = if offset.is_zero() {
        leading
    } else {
        Node::sum(vec![leading, scalar_to_node(&offset)])
    };
    Ok(Expr::from_node(result))
}
