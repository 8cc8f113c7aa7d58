//! Equation-solving interfaces: single equations and inequations, linear
//! systems, one-symbol inequality systems, and solving for a chosen
//! unknown. Everything is exact; irrational roots come out as `a + b√d`.

use std::collections::{BTreeMap, BTreeSet};

use crate::expr::canonical::{canonical_to_node, poly_to_node, scalar_to_node};
use crate::expr::poly::Poly;
use crate::expr::scalar::{Scalar, ScalarError};
use crate::expr::{canonicalize, Bound, Expr, ExprKind, Node, RelOp, SolutionItem, Symbol};

use super::factoring::factor_poly;
use super::InterfaceError;

fn scalar_err(e: ScalarError) -> InterfaceError {
    InterfaceError::NonRationalForm(e.to_string())
}

/// All real solutions of a univariate equation of degree <= 2, or of
/// higher degree when it factors down to quadratics.
pub fn solve_eq(e: &Expr) -> Result<Expr, InterfaceError> {
    if e.kind() != ExprKind::Equation {
        return Err(InterfaceError::NonRationalForm(format!(
            "solve_eq takes an equation; `{e}` is not one (for an inequality use solve_ineq)"
        )));
    }
    let cf = canonicalize(e)?;
    let numerator = cf.numerator();
    let denominator = cf.denominator();
    let mut symbols: BTreeSet<Symbol> = numerator.vars();
    symbols.extend(denominator.vars());
    let symbols: Vec<Symbol> = symbols.into_iter().collect();
    if symbols.len() > 1 {
        return Err(InterfaceError::NotUnivariate { symbols });
    }
    let Some(symbol) = symbols.first().cloned() else {
        return Err(InterfaceError::NotUnivariate { symbols });
    };
    if numerator.is_zero() {
        return Ok(solution_set(vec![SolutionItem::AllReals { symbol }]));
    }
    if numerator.is_constant() {
        return Ok(solution_set(Vec::new()));
    }

    let mut roots = univariate_roots(numerator, &symbol)?;
    // Roots that blow up the denominator are extraneous.
    if !denominator.is_constant() {
        roots.retain(|root| {
            let mut assignment = BTreeMap::new();
            assignment.insert(symbol.clone(), root.clone());
            match denominator.eval(&assignment) {
                Ok(v) => !v.is_zero(),
                Err(_) => true,
            }
        });
    }
    sort_dedup(&mut roots);
    let items = roots
        .into_iter()
        .map(|root| SolutionItem::Binding {
            symbol: symbol.clone(),
            value: scalar_to_node(&root),
        })
        .collect();
    Ok(solution_set(items))
}

fn univariate_roots(poly: &Poly, symbol: &Symbol) -> Result<Vec<Scalar>, InterfaceError> {
    let coeffs = constant_coeffs(poly, symbol)?;
    match coeffs.len() - 1 {
        1 => Ok(vec![coeffs[1]
            .inverse()
            .map_err(scalar_err)?
            .mul(&coeffs[0])
            .map_err(scalar_err)?
            .neg()]),
        2 => quadratic_roots(&coeffs[2], &coeffs[1], &coeffs[0]),
        degree => {
            // Higher degrees go through factoring.
            let factored = factor_poly(poly)?;
            let mut roots = Vec::new();
            for (factor, _) in &factored.factors {
                let fc = constant_coeffs(factor, symbol)?;
                match fc.len() - 1 {
                    0 => {}
                    1 => roots.push(
                        fc[1]
                            .inverse()
                            .map_err(scalar_err)?
                            .mul(&fc[0])
                            .map_err(scalar_err)?
                            .neg(),
                    ),
                    2 => roots.extend(quadratic_roots(&fc[2], &fc[1], &fc[0])?),
                    _ => {
                        return Err(InterfaceError::UnsupportedDegree {
                            degree: degree as u32,
                            detail: format!(
                                "`{}` does not factor into linear and quadratic parts",
                                poly_node(poly)
                            ),
                        })
                    }
                }
            }
            Ok(roots)
        }
    }
}

/// Real roots of `a x^2 + b x + c`, ascending; empty when none exist.
fn quadratic_roots(a: &Scalar, b: &Scalar, c: &Scalar) -> Result<Vec<Scalar>, InterfaceError> {
    let four_ac = Scalar::from_int(4)
        .mul(a)
        .and_then(|v| v.mul(c))
        .map_err(scalar_err)?;
    let disc = b.mul(b).and_then(|bb| bb.sub(&four_ac)).map_err(scalar_err)?;
    let Some(disc_rat) = disc.as_rational() else {
        return Err(InterfaceError::UnsupportedDegree {
            degree: 2,
            detail: "the discriminant is irrational, so the roots leave the a+b\\sqrt{d} form"
                .into(),
        });
    };
    if disc_rat < &num::BigRational::from_integer(0.into()) {
        return Ok(Vec::new());
    }
    let s = Scalar::sqrt_rational(disc_rat).map_err(scalar_err)?;
    let two_a = Scalar::from_int(2).mul(a).map_err(scalar_err)?;
    let minus_b = b.neg();
    let mut roots = vec![
        minus_b.add(&s).and_then(|v| v.div(&two_a)).map_err(scalar_err)?,
        minus_b.sub(&s).and_then(|v| v.div(&two_a)).map_err(scalar_err)?,
    ];
    sort_dedup(&mut roots);
    Ok(roots)
}

fn sort_dedup(roots: &mut Vec<Scalar>) {
    roots.sort_by(|a, b| a.cmp_value(b));
    roots.dedup();
}

fn constant_coeffs(poly: &Poly, symbol: &Symbol) -> Result<Vec<Scalar>, InterfaceError> {
    poly.coeffs_in(symbol)
        .into_iter()
        .map(|c| {
            c.constant_value().ok_or_else(|| InterfaceError::NotUnivariate {
                symbols: poly.vars().into_iter().collect(),
            })
        })
        .collect()
}

fn poly_node(poly: &Poly) -> Expr {
    Expr::from_node(poly_to_node(poly))
}

fn solution_set(items: Vec<SolutionItem>) -> Expr {
    Expr::from_node(Node::Solutions(items))
}

// ---------------------------------------------------------------------
// Intervals
// ---------------------------------------------------------------------

type ScalarBound = (Scalar, bool); // value, inclusive

/// A nonempty interval over the reals; `None` bounds are infinite.
#[derive(Debug, Clone, PartialEq)]
struct Span {
    lower: Option<ScalarBound>,
    upper: Option<ScalarBound>,
}

impl Span {
    fn all() -> Span {
        Span {
            lower: None,
            upper: None,
        }
    }

    fn point(value: Scalar) -> Span {
        Span {
            lower: Some((value.clone(), true)),
            upper: Some((value, true)),
        }
    }

    fn is_point(&self) -> Option<&Scalar> {
        match (&self.lower, &self.upper) {
            (Some((lo, true)), Some((hi, true))) if lo == hi => Some(lo),
            _ => None,
        }
    }

    /// `None` when the intersection is empty.
    fn intersect(&self, other: &Span) -> Option<Span> {
        let lower = match (&self.lower, &other.lower) {
            (None, b) => b.clone(),
            (a, None) => a.clone(),
            (Some((va, ia)), Some((vb, ib))) => match va.cmp_value(vb) {
                std::cmp::Ordering::Greater => Some((va.clone(), *ia)),
                std::cmp::Ordering::Less => Some((vb.clone(), *ib)),
                std::cmp::Ordering::Equal => Some((va.clone(), *ia && *ib)),
            },
        };
        let upper = match (&self.upper, &other.upper) {
            (None, b) => b.clone(),
            (a, None) => a.clone(),
            (Some((va, ia)), Some((vb, ib))) => match va.cmp_value(vb) {
                std::cmp::Ordering::Less => Some((va.clone(), *ia)),
                std::cmp::Ordering::Greater => Some((vb.clone(), *ib)),
                std::cmp::Ordering::Equal => Some((va.clone(), *ia && *ib)),
            },
        };
        if let (Some((lo, lo_inc)), Some((hi, hi_inc))) = (&lower, &upper) {
            match lo.cmp_value(hi) {
                std::cmp::Ordering::Greater => return None,
                std::cmp::Ordering::Equal if !(*lo_inc && *hi_inc) => return None,
                _ => {}
            }
        }
        Some(Span { lower, upper })
    }

    fn to_item(&self, symbol: &Symbol) -> SolutionItem {
        if self.lower.is_none() && self.upper.is_none() {
            return SolutionItem::AllReals {
                symbol: symbol.clone(),
            };
        }
        if let Some(point) = self.is_point() {
            return SolutionItem::Binding {
                symbol: symbol.clone(),
                value: scalar_to_node(point),
            };
        }
        let bound = |b: &ScalarBound| Bound {
            value: scalar_to_node(&b.0),
            inclusive: b.1,
        };
        SolutionItem::Interval {
            symbol: symbol.clone(),
            lower: self.lower.as_ref().map(bound),
            upper: self.upper.as_ref().map(bound),
        }
    }
}

/// Sort spans and merge overlapping or touching neighbours.
fn normalize_union(mut spans: Vec<Span>) -> Vec<Span> {
    spans.sort_by(|a, b| match (&a.lower, &b.lower) {
        (None, None) => std::cmp::Ordering::Equal,
        (None, Some(_)) => std::cmp::Ordering::Less,
        (Some(_), None) => std::cmp::Ordering::Greater,
        (Some((va, ia)), Some((vb, ib))) => va
            .cmp_value(vb)
            .then_with(|| ib.cmp(ia)), // inclusive bound sorts first
    });
    let mut out: Vec<Span> = Vec::new();
    for span in spans {
        match out.last_mut() {
            Some(last) if spans_touch(last, &span) => {
                let merged_upper = match (&last.upper, &span.upper) {
                    (None, _) | (_, None) => None,
                    (Some((va, ia)), Some((vb, ib))) => match va.cmp_value(vb) {
                        std::cmp::Ordering::Greater => Some((va.clone(), *ia)),
                        std::cmp::Ordering::Less => Some((vb.clone(), *ib)),
                        std::cmp::Ordering::Equal => Some((va.clone(), *ia || *ib)),
                    },
                };
                last.upper = merged_upper;
            }
            _ => out.push(span),
        }
    }
    out
}

/// With `a.lower <= b.lower`, do the spans overlap or touch?
fn spans_touch(a: &Span, b: &Span) -> bool {
    let (Some((upper, upper_inc)), Some((lower, lower_inc))) = (&a.upper, &b.lower) else {
        return true;
    };
    match upper.cmp_value(lower) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => *upper_inc || *lower_inc,
        std::cmp::Ordering::Less => false,
    }
}

fn intersect_unions(a: &[Span], b: &[Span]) -> Vec<Span> {
    let mut out = Vec::new();
    for sa in a {
        for sb in b {
            if let Some(i) = sa.intersect(sb) {
                out.push(i);
            }
        }
    }
    normalize_union(out)
}

/// Solve one inequation into an interval union over its symbol.
fn ineq_union(e: &Expr) -> Result<(Symbol, Vec<Span>), InterfaceError> {
    if e.kind() != ExprKind::Inequation {
        return Err(InterfaceError::NonRationalForm(format!(
            "solve_ineq takes an inequation; `{e}` is not one (for an equation use solve_eq)"
        )));
    }
    let Node::Relation { op, .. } = e.root() else {
        unreachable!("inequation kind has a relation root");
    };
    let cf = canonicalize(e)?;
    if !cf.is_polynomial() {
        return Err(InterfaceError::NonRationalForm(
            "the inequality has a symbolic denominator, which is out of scope".into(),
        ));
    }
    let poly = cf.numerator();
    let symbols: Vec<Symbol> = poly.vars().into_iter().collect();
    if symbols.len() != 1 {
        return Err(InterfaceError::NotUnivariate { symbols });
    }
    let symbol = symbols[0].clone();
    let degree = poly.degree_in(&symbol);
    if degree > 2 {
        return Err(InterfaceError::UnsupportedDegree {
            degree,
            detail: format!("`{}` has degree {degree} in {symbol}", poly_node(poly)),
        });
    }
    let coeffs = constant_coeffs(poly, &symbol)?;
    let union = if degree == 1 {
        linear_ineq(&coeffs[1], &coeffs[0], *op)?
    } else {
        quadratic_ineq(&coeffs[2], &coeffs[1], &coeffs[0], *op)?
    };
    Ok((symbol, union))
}

fn linear_ineq(a: &Scalar, b: &Scalar, op: RelOp) -> Result<Vec<Span>, InterfaceError> {
    // a x + b OP 0  =>  x OP' -b/a, flipping when a < 0.
    let root = b.div(a).map_err(scalar_err)?.neg();
    let op = if a.signum() < 0 { op.flipped() } else { op };
    Ok(match op {
        RelOp::Lt => vec![Span {
            lower: None,
            upper: Some((root, false)),
        }],
        RelOp::Le => vec![Span {
            lower: None,
            upper: Some((root, true)),
        }],
        RelOp::Gt => vec![Span {
            lower: Some((root, false)),
            upper: None,
        }],
        RelOp::Ge => vec![Span {
            lower: Some((root, true)),
            upper: None,
        }],
        RelOp::Eq => unreachable!("inequations carry inequality operators"),
    })
}

fn quadratic_ineq(
    a: &Scalar,
    b: &Scalar,
    c: &Scalar,
    op: RelOp,
) -> Result<Vec<Span>, InterfaceError> {
    // Normalize to a positive leading coefficient.
    let (a, b, c, op) = if a.signum() < 0 {
        (a.neg(), b.neg(), c.neg(), op.flipped())
    } else {
        (a.clone(), b.clone(), c.clone(), op)
    };
    let roots = quadratic_roots(&a, &b, &c)?;
    Ok(match roots.as_slice() {
        [] => match op {
            // The parabola is positive everywhere.
            RelOp::Gt | RelOp::Ge => vec![Span::all()],
            _ => Vec::new(),
        },
        [r] => match op {
            RelOp::Gt => vec![
                Span {
                    lower: None,
                    upper: Some((r.clone(), false)),
                },
                Span {
                    lower: Some((r.clone(), false)),
                    upper: None,
                },
            ],
            RelOp::Ge => vec![Span::all()],
            RelOp::Lt => Vec::new(),
            RelOp::Le => vec![Span::point(r.clone())],
            RelOp::Eq => unreachable!(),
        },
        [r1, r2] => match op {
            RelOp::Lt => vec![Span {
                lower: Some((r1.clone(), false)),
                upper: Some((r2.clone(), false)),
            }],
            RelOp::Le => vec![Span {
                lower: Some((r1.clone(), true)),
                upper: Some((r2.clone(), true)),
            }],
            RelOp::Gt => vec![
                Span {
                    lower: None,
                    upper: Some((r1.clone(), false)),
                },
                Span {
                    lower: Some((r2.clone(), false)),
                    upper: None,
                },
            ],
            RelOp::Ge => vec![
                Span {
                    lower: None,
                    upper: Some((r1.clone(), true)),
                },
                Span {
                    lower: Some((r2.clone(), true)),
                    upper: None,
                },
            ],
            RelOp::Eq => unreachable!(),
        },
        _ => unreachable!("a quadratic has at most two roots"),
    })
}

/// Interval constraints satisfying a single inequation.
pub fn solve_ineq(e: &Expr) -> Result<Expr, InterfaceError> {
    let (symbol, union) = ineq_union(e)?;
    let items = normalize_union(union)
        .iter()
        .map(|span| span.to_item(&symbol))
        .collect();
    Ok(solution_set(items))
}

/// Intersection of the solution intervals of several inequations sharing
/// one free symbol.
pub fn solve_multi_ineq(ineqs: &[Expr]) -> Result<Expr, InterfaceError> {
    let mut shared: Option<Symbol> = None;
    let mut acc = vec![Span::all()];
    for e in ineqs {
        let (symbol, union) = ineq_union(e)?;
        match &shared {
            None => shared = Some(symbol),
            Some(s) if *s == symbol => {}
            Some(s) => {
                return Err(InterfaceError::NotUnivariate {
                    symbols: vec![s.clone(), symbol],
                })
            }
        }
        acc = intersect_unions(&acc, &normalize_union(union));
        if acc.is_empty() {
            break;
        }
    }
    let symbol = shared.expect("at least one inequation by arity");
    let items = acc.iter().map(|span| span.to_item(&symbol)).collect();
    Ok(solution_set(items))
}

/// Solve a linear system by Gauss-Jordan elimination. Underdetermined
/// systems express pivot symbols in terms of the free ones.
pub fn solve_multi_eq(eqs: &[Expr]) -> Result<Expr, InterfaceError> {
    let mut numerators = Vec::new();
    for e in eqs {
        if e.kind() != ExprKind::Equation {
            return Err(InterfaceError::NonRationalForm(format!(
                "solve_multi_eq takes equations; `{e}` is not one"
            )));
        }
        numerators.push(canonicalize(e)?.numerator().clone());
    }
    let mut symbols: BTreeSet<Symbol> = BTreeSet::new();
    for n in &numerators {
        symbols.extend(n.vars());
    }
    let symbols: Vec<Symbol> = symbols.into_iter().collect();
    if symbols.is_empty() {
        return if numerators.iter().all(Poly::is_zero) {
            Err(InterfaceError::NotUnivariate { symbols })
        } else {
            Err(InterfaceError::Inconsistent)
        };
    }
    for (index, n) in numerators.iter().enumerate() {
        if n.total_degree() > 1 {
            return Err(InterfaceError::NonLinearSystem(format!(
                "equation {} has degree {}",
                index + 1,
                n.total_degree()
            )));
        }
    }

    // Augmented matrix in symbol order.
    let cols = symbols.len();
    let mut matrix: Vec<Vec<Scalar>> = Vec::new();
    for n in &numerators {
        let mut row = Vec::with_capacity(cols + 1);
        for s in &symbols {
            let coeff = n
                .coeffs_in(s)
                .get(1)
                .cloned()
                .unwrap_or_else(Poly::zero)
                .constant_value()
                .expect("linear system");
            row.push(coeff);
        }
        row.push(n.constant_term().neg());
        matrix.push(row);
    }

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (col, row)
    let mut rank = 0usize;
    for col in 0..cols {
        let Some(pivot_row) = (rank..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(rank, pivot_row);
        let pivot = matrix[rank][col].clone();
        for value in &mut matrix[rank] {
            *value = value.div(&pivot).map_err(scalar_err)?;
        }
        for row in 0..matrix.len() {
            if row != rank && !matrix[row][col].is_zero() {
                let factor = matrix[row][col].clone();
                for c in 0..=cols {
                    let delta = matrix[rank][c].mul(&factor).map_err(scalar_err)?;
                    matrix[row][c] = matrix[row][c].sub(&delta).map_err(scalar_err)?;
                }
            }
        }
        pivots.push((col, rank));
        rank += 1;
    }
    for row in rank..matrix.len() {
        if !matrix[row][cols].is_zero() {
            return Err(InterfaceError::Inconsistent);
        }
    }

    let pivot_cols: BTreeSet<usize> = pivots.iter().map(|(c, _)| *c).collect();
    let mut items = Vec::new();
    for (col, row) in pivots {
        // symbol = rhs - sum(coeff * free symbol)
        let mut value = Poly::constant(matrix[row][cols].clone());
        for free_col in 0..cols {
            if pivot_cols.contains(&free_col) || matrix[row][free_col].is_zero() {
                continue;
            }
            let term = Poly::symbol(symbols[free_col].clone())
                .mul_scalar(&matrix[row][free_col])
                .map_err(scalar_err)?;
            value = value.sub(&term).map_err(scalar_err)?;
        }
        items.push(SolutionItem::Binding {
            symbol: symbols[col].clone(),
            value: poly_to_node(&value),
        });
    }
    Ok(solution_set(items))
}

/// Solve for `unknown`, treating the other symbols as constants.
pub fn partial_solve(e: &Expr, unknown: &Symbol) -> Result<Expr, InterfaceError> {
    if e.kind() != ExprKind::Equation {
        return Err(InterfaceError::NonRationalForm(format!(
            "partial_solve takes an equation; `{e}` is not one"
        )));
    }
    if !e.free_symbols().contains(unknown) {
        return Err(InterfaceError::SymbolAbsent {
            symbol: unknown.clone(),
        });
    }
    let cf = canonicalize(e)?;
    let poly = cf.numerator();
    let degree = poly.degree_in(unknown);
    match degree {
        0 => Err(InterfaceError::SymbolAbsent {
            symbol: unknown.clone(),
        }),
        1 => {
            let coeffs = poly.coeffs_in(unknown);
            let value = divide_polys(&coeffs[0].neg(), &coeffs[1])?;
            Ok(solution_set(vec![SolutionItem::Binding {
                symbol: unknown.clone(),
                value,
            }]))
        }
        2 => {
            let coeffs = poly.coeffs_in(unknown);
            let a = coeffs[2].clone();
            let b = coeffs[1].clone();
            let c = coeffs[0].clone();
            let disc = b
                .mul(&b)
                .and_then(|bb| {
                    let four_ac = a.mul(&c)?.mul_scalar(&Scalar::from_int(4))?;
                    bb.sub(&four_ac)
                })
                .map_err(scalar_err)?;
            let two_a = a.mul_scalar(&Scalar::from_int(2)).map_err(scalar_err)?;
            let root_nodes: Vec<Node> = if let Some(s) = disc.sqrt_exact() {
                let plus = b.neg().add(&s).map_err(scalar_err)?;
                let minus = b.neg().sub(&s).map_err(scalar_err)?;
                let mut nodes = vec![divide_polys(&plus, &two_a)?];
                if !s.is_zero() {
                    nodes.push(divide_polys(&minus, &two_a)?);
                }
                nodes
            } else if let Some(d) = disc.constant_value() {
                let Some(d_rat) = d.as_rational() else {
                    return Err(InterfaceError::UnsupportedDegree {
                        degree: 2,
                        detail: "the discriminant is irrational".into(),
                    });
                };
                if d_rat < &num::BigRational::from_integer(0.into()) {
                    return Ok(solution_set(Vec::new()));
                }
                let s = Scalar::sqrt_rational(d_rat).map_err(scalar_err)?;
                let mut nodes = Vec::new();
                for sign in [1, -1] {
                    let s_node = scalar_to_node(&if sign > 0 { s.clone() } else { s.neg() });
                    let numer = Node::sum(vec![poly_to_node(&b.neg()), s_node]);
                    nodes.push(simplified_div(numer, poly_to_node(&two_a)));
                    if s.is_zero() {
                        break;
                    }
                }
                nodes
            } else {
                return Err(InterfaceError::UnsupportedDegree {
                    degree: 2,
                    detail: format!(
                        "the discriminant `{}` is not a perfect square",
                        poly_node(&disc)
                    ),
                });
            };
            let mut values: Vec<Node> = root_nodes;
            values.sort_by_key(|n| Expr::from_node(n.clone()).to_string());
            values.dedup();
            let items = values
                .into_iter()
                .map(|value| SolutionItem::Binding {
                    symbol: unknown.clone(),
                    value,
                })
                .collect();
            Ok(solution_set(items))
        }
        _ => Err(InterfaceError::UnsupportedDegree {
            degree,
            detail: format!("the equation has degree {degree} in {unknown}"),
        }),
    }
}

/// `numerator / denominator` over polynomials, simplified where possible.
fn divide_polys(numerator: &Poly, denominator: &Poly) -> Result<Node, InterfaceError> {
    if let Some(c) = denominator.constant_value() {
        if c.is_zero() {
            return Err(InterfaceError::NonRationalForm(
                "division by a zero coefficient".into(),
            ));
        }
        return Ok(poly_to_node(&numerator.div_scalar(&c).map_err(scalar_err)?));
    }
    Ok(simplified_div(
        poly_to_node(numerator),
        poly_to_node(denominator),
    ))
}

fn simplified_div(numerator: Node, denominator: Node) -> Node {
    let raw = Node::div(numerator, denominator);
    match crate::expr::canonical::node_canonical(&raw) {
        Ok(cf) => canonical_to_node(&cf),
        Err(_) => raw,
    }
}
