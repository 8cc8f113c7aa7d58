//! Canonical surface rendering. The printer and parser are tuned to each
//! other so that printing and re-parsing reproduces the same AST;
//! `proptest` coverage for that property lives in the module tests.

use std::fmt;

use num::{BigRational, Signed};

use super::{Bound, Node, SolutionItem};

pub(crate) fn write_node(f: &mut fmt::Formatter<'_>, node: &Node) -> fmt::Result {
    f.write_str(&top_string(node))
}

fn top_string(node: &Node) -> String {
    match node {
        Node::Relation { op, lhs, rhs } => {
            format!("{} {} {}", s_node(lhs), op.as_str(), s_node(rhs))
        }
        Node::Solutions(items) => {
            let parts: Vec<String> = items.iter().map(item_string).collect();
            format!("[{}]", parts.join(", "))
        }
        other => s_node(other),
    }
}

fn item_string(item: &SolutionItem) -> String {
    match item {
        SolutionItem::Binding { symbol, value } => format!("{symbol}={}", s_node(value)),
        SolutionItem::Interval {
            symbol,
            lower,
            upper,
        } => {
            let op = |b: &Bound| if b.inclusive { "<=" } else { "<" };
            match (lower, upper) {
                (Some(lo), Some(hi)) => format!(
                    "{}{}{symbol}{}{}",
                    s_node(&lo.value),
                    op(lo),
                    op(hi),
                    s_node(&hi.value)
                ),
                (Some(lo), None) => {
                    let op = if lo.inclusive { ">=" } else { ">" };
                    format!("{symbol}{op}{}", s_node(&lo.value))
                }
                (None, Some(hi)) => format!("{symbol}{}{}", op(hi), s_node(&hi.value)),
                (None, None) => format!("{symbol} \\in R"),
            }
        }
        SolutionItem::AllReals { symbol } => format!("{symbol} \\in R"),
    }
}

/// Sum-level rendering: the context inside groups, relation sides, and
/// fraction parts.
fn s_node(node: &Node) -> String {
    match node {
        Node::Sum(terms) => {
            let mut out = s_term(&terms[0]);
            for term in &terms[1..] {
                match split_negative(term) {
                    Some(positive) => {
                        out.push_str(" - ");
                        out.push_str(&s_term(&positive));
                    }
                    None => {
                        out.push_str(" + ");
                        out.push_str(&s_term(term));
                    }
                }
            }
            out
        }
        other => s_term(other),
    }
}

/// Render a `+`/`-` operand; sums get parenthesized.
fn s_term(node: &Node) -> String {
    match node {
        Node::Sum(_) => format!("({})", s_node(node)),
        Node::Neg(inner) => {
            let body = s_term(inner);
            if body.starts_with('-') {
                format!("-({body})")
            } else {
                format!("-{body}")
            }
        }
        Node::Product(factors) => product_string(factors),
        Node::Div(a, b) => frac_string(a, b),
        Node::Power(base, exp) => power_string(base, exp),
        Node::Sqrt(inner) => format!("\\sqrt{{{}}}", s_node(inner)),
        Node::Rational(r) => rational_string(r),
        Node::Symbol(s) => s.to_string(),
        // Relations and solution sets only occur at the root.
        other => format!("({})", top_string(other)),
    }
}

fn product_string(factors: &[Node]) -> String {
    let mut out = String::new();
    for (i, factor) in factors.iter().enumerate() {
        let part = factor_string(factor, i == 0);
        if i > 0 {
            let juxtaposable = part
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '(' || c == '\\');
            if !juxtaposable {
                out.push_str(" * ");
            }
        }
        out.push_str(&part);
    }
    out
}

fn factor_string(node: &Node, first: bool) -> String {
    match node {
        Node::Rational(r) => {
            if first || !r.is_negative() {
                rational_string(r)
            } else {
                format!("({})", rational_string(r))
            }
        }
        Node::Sum(_) | Node::Product(_) | Node::Neg(_) => format!("({})", s_node(node)),
        Node::Div(a, b) => frac_string(a, b),
        Node::Power(base, exp) => power_string(base, exp),
        Node::Sqrt(inner) => format!("\\sqrt{{{}}}", s_node(inner)),
        Node::Symbol(s) => s.to_string(),
        other => format!("({})", top_string(other)),
    }
}

fn power_string(base: &Node, exp: &Node) -> String {
    let base_str = match base {
        Node::Symbol(s) => s.to_string(),
        Node::Rational(r) if !r.is_negative() => rational_string(r),
        Node::Sqrt(inner) => format!("\\sqrt{{{}}}", s_node(inner)),
        Node::Div(a, b) => frac_string(a, b),
        other => format!("({})", s_node(other)),
    };
    let exp_str = match exp {
        Node::Rational(r)
            if r.is_integer()
                && !r.is_negative()
                && *r < BigRational::from_integer(10.into()) =>
        {
            rational_string(r)
        }
        Node::Symbol(s) if !s.name().contains('_') => s.to_string(),
        other => format!("{{{}}}", s_node(other)),
    };
    format!("{base_str}^{exp_str}")
}

fn frac_string(a: &Node, b: &Node) -> String {
    format!("\\frac{{{}}}{{{}}}", s_node(a), s_node(b))
}

fn rational_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else if r.is_negative() {
        format!("-\\frac{{{}}}{{{}}}", r.numer().magnitude(), r.denom())
    } else {
        format!("\\frac{{{}}}{{{}}}", r.numer(), r.denom())
    }
}

/// If `term` renders naturally with a leading minus, return the positive
/// counterpart whose rendering follows `" - "`. The shapes handled here
/// are exactly the ones `Node::neg` normalizes to.
fn split_negative(term: &Node) -> Option<Node> {
    match term {
        Node::Neg(inner) => Some((**inner).clone()),
        Node::Rational(r) if r.is_negative() => Some(Node::Rational(-r.clone())),
        Node::Product(factors) => match factors.first() {
            Some(Node::Rational(r)) if r.is_negative() => {
                let mut flipped = factors.clone();
                flipped[0] = Node::Rational(-r.clone());
                Some(Node::Product(flipped))
            }
            _ => None,
        },
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Expr, Node};
    use proptest::prelude::*;

    fn roundtrip(text: &str) -> String {
        parse(text).unwrap().to_string()
    }

    #[test]
    fn pinned_surface_forms() {
        let half_x = Expr::from_node(Node::product(vec![
            Node::rational(1, 2),
            Node::symbol("x"),
        ]));
        assert_eq!(half_x.to_string(), "\\frac{1}{2}x");
        assert_eq!(parse(&half_x.to_string()).unwrap(), half_x);

        let poly = Expr::from_node(Node::sum(vec![
            Node::power(Node::symbol("x"), Node::int(2)),
            Node::product(vec![Node::int(2), Node::symbol("x")]),
            Node::int(1),
        ]));
        assert_eq!(poly.to_string(), "x^2 + 2x + 1");

        assert_eq!(roundtrip("[k=-\\frac{1}{2}]"), "[k=-\\frac{1}{2}]");
    }

    #[test]
    fn sums_render_subtraction() {
        assert_eq!(roundtrip("a - 2x"), "a - 2x");
        assert_eq!(roundtrip("a + -2x"), "a - 2x");
        assert_eq!(roundtrip("3y-3=3"), "3y - 3 = 3");
        assert_eq!(roundtrip("-x^2"), "-x^2");
        assert_eq!(roundtrip("x-(y+1)"), "x - (y + 1)");
    }

    #[test]
    fn intervals_and_sets() {
        assert_eq!(roundtrip("[1<x<3]"), "[1<x<3]");
        assert_eq!(roundtrip("[x>=0, x=2]"), "[x>=0, x=2]");
        assert_eq!(roundtrip("[x \\in R]"), "[x \\in R]");
        assert_eq!(roundtrip("[]"), "[]");
    }

    #[test]
    fn explicit_star_only_where_needed() {
        assert_eq!(roundtrip("2 * 3"), "2 * 3");
        assert_eq!(roundtrip("2b(y-1)"), "2b(y - 1)");
        assert_eq!(roundtrip("x(-2)"), "x(-2)");
    }

    // Strategy for random expression trees built through the same smart
    // constructors every other component uses.
    fn node_strategy() -> impl Strategy<Value = Node> {
        let leaf = prop_oneof![
            (-9i64..=9).prop_map(Node::int),
            (1i64..=9, 2i64..=5).prop_map(|(n, d)| Node::rational(n, d)),
            prop_oneof![
                Just(Node::symbol("x")),
                Just(Node::symbol("y")),
                Just(Node::symbol("a_1")),
                Just(Node::symbol("b_12")),
            ],
        ];
        leaf.prop_recursive(4, 48, 4, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2..4).prop_map(Node::sum),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Node::product),
                (inner.clone(), 0u32..4)
                    .prop_map(|(b, e)| Node::power(b, Node::int(e as i64))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Node::div(a, b)),
                inner.clone().prop_map(Node::neg),
                inner.prop_map(Node::sqrt),
            ]
        })
    }

    proptest! {
        // For every grammatical string e: parse(print(parse(e))) == parse(e).
        // Random trees are printed to obtain grammatical strings.
        #[test]
        fn print_parse_roundtrip(node in node_strategy()) {
            let printed = Expr::from_node(node).to_string();
            let first = parse(&printed).unwrap_or_else(|e| panic!("parse({printed:?}): {e}"));
            let reprinted = first.to_string();
            let second = parse(&reprinted)
                .unwrap_or_else(|e| panic!("reparse({reprinted:?}): {e}"));
            prop_assert_eq!(&second, &first, "unstable roundtrip via {:?}", printed);
        }
    }
}
