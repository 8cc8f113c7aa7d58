//! Expression substrate: a LaTeX-subset AST with exact rational constants,
//! parsing, printing, canonicalization, and mathematical equivalence.
//!
//! Every other part of the crate manipulates [`Expr`] values. Expressions
//! are immutable after construction and cheap to clone relative to the
//! problem sizes involved (middle-school algebra).

use std::fmt;

use num::{BigRational, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub mod canonical;
pub mod equiv;
mod lexer;
mod parser;
pub mod poly;
mod printer;
pub mod scalar;

pub use canonical::{canonicalize, CanonError, CanonicalForm};
pub use equiv::{is_equiv, EquivError};
pub use parser::{parse, ParseError};

/// Relation operators permitted at the root of equations and inequations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Eq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn as_str(self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }

    /// Mirror image, e.g. `a < b` becomes `b > a`.
    pub fn flipped(self) -> RelOp {
        match self {
            RelOp::Eq => RelOp::Eq,
            RelOp::Lt => RelOp::Gt,
            RelOp::Le => RelOp::Ge,
            RelOp::Gt => RelOp::Lt,
            RelOp::Ge => RelOp::Le,
        }
    }

    pub fn is_equality(self) -> bool {
        matches!(self, RelOp::Eq)
    }
}

/// A variable: one letter with an optional subscript, e.g. `x` or `a_1`.
///
/// Symbols order lexicographically by their normalized name; this fixed
/// order is what canonical forms and solution sets sort by.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(String);

impl Symbol {
    pub fn new(name: impl Into<String>) -> Symbol {
        Symbol(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.split_once('_') {
            Some((head, sub)) if sub.chars().count() > 1 => write!(f, "{head}_{{{sub}}}"),
            _ => write!(f, "{}", self.0),
        }
    }
}

/// One endpoint of an interval constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct Bound {
    pub value: Node,
    pub inclusive: bool,
}

/// An element of a solution set. Items are alternatives: the set as a
/// whole is the union of its items.
#[derive(Debug, Clone, PartialEq)]
pub enum SolutionItem {
    /// `symbol = value`
    Binding { symbol: Symbol, value: Node },
    /// `lo < symbol < hi` with either side optional (at least one present).
    Interval {
        symbol: Symbol,
        lower: Option<Bound>,
        upper: Option<Bound>,
    },
    /// Every real number satisfies the constraint.
    AllReals { symbol: Symbol },
}

impl SolutionItem {
    pub fn symbol(&self) -> &Symbol {
        match self {
            SolutionItem::Binding { symbol, .. }
            | SolutionItem::Interval { symbol, .. }
            | SolutionItem::AllReals { symbol } => symbol,
        }
    }
}

/// AST node. Relations appear only at the root of an [`Expr`]; solution
/// sets likewise. The parser enforces both, and every operation in this
/// crate preserves them.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Exact rational constant, always in lowest terms.
    Rational(BigRational),
    Symbol(Symbol),
    Sum(Vec<Node>),
    Product(Vec<Node>),
    Power(Box<Node>, Box<Node>),
    Neg(Box<Node>),
    /// A fraction as written (`\frac{a}{b}` or `a / b`); constant-over-
    /// constant folds to `Rational` at construction.
    Div(Box<Node>, Box<Node>),
    Sqrt(Box<Node>),
    Relation {
        op: RelOp,
        lhs: Box<Node>,
        rhs: Box<Node>,
    },
    Solutions(Vec<SolutionItem>),
}

impl Node {
    pub fn int(value: i64) -> Node {
        Node::Rational(BigRational::from_integer(value.into()))
    }

    pub fn rational(numer: i64, denom: i64) -> Node {
        Node::Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn symbol(name: &str) -> Node {
        Node::Symbol(Symbol::new(name))
    }

    /// Sum with the usual degenerate cases folded away.
    pub fn sum(mut terms: Vec<Node>) -> Node {
        match terms.len() {
            0 => Node::int(0),
            1 => terms.pop().unwrap(),
            _ => Node::Sum(terms),
        }
    }

    pub fn product(mut factors: Vec<Node>) -> Node {
        match factors.len() {
            0 => Node::int(1),
            1 => factors.pop().unwrap(),
            _ => Node::Product(factors),
        }
    }

    /// Negation, normalized so that the parser and printer agree on one
    /// shape per surface form: `-c` folds into the constant, `-(2x)`
    /// folds into the leading coefficient, and double negation cancels.
    pub fn neg(node: Node) -> Node {
        match node {
            Node::Rational(r) => Node::Rational(-r),
            Node::Neg(inner) => *inner,
            Node::Product(mut factors) if matches!(factors.first(), Some(Node::Rational(_))) => {
                if let Some(Node::Rational(r)) = factors.first_mut() {
                    *r = -r.clone();
                }
                Node::Product(factors)
            }
            other => Node::Neg(Box::new(other)),
        }
    }

    /// Division; folds constant/constant with a nonzero denominator.
    pub fn div(num: Node, den: Node) -> Node {
        if let (Node::Rational(a), Node::Rational(b)) = (&num, &den) {
            if !b.numer().is_zero() {
                return Node::Rational(a / b);
            }
        }
        Node::Div(Box::new(num), Box::new(den))
    }

    pub fn power(base: Node, exponent: Node) -> Node {
        Node::Power(Box::new(base), Box::new(exponent))
    }

    pub fn sqrt(radicand: Node) -> Node {
        Node::Sqrt(Box::new(radicand))
    }

    pub fn relation(op: RelOp, lhs: Node, rhs: Node) -> Node {
        Node::Relation {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn is_zero_const(&self) -> bool {
        matches!(self, Node::Rational(r) if r.numer().is_zero())
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Node::Rational(r) => Some(r),
            _ => None,
        }
    }

    fn collect_symbols(&self, out: &mut std::collections::BTreeSet<Symbol>) {
        match self {
            Node::Rational(_) => {}
            Node::Symbol(s) => {
                out.insert(s.clone());
            }
            Node::Sum(items) | Node::Product(items) => {
                for item in items {
                    item.collect_symbols(out);
                }
            }
            Node::Power(a, b) | Node::Div(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Node::Neg(a) | Node::Sqrt(a) => a.collect_symbols(out),
            Node::Relation { lhs, rhs, .. } => {
                lhs.collect_symbols(out);
                rhs.collect_symbols(out);
            }
            Node::Solutions(items) => {
                for item in items {
                    match item {
                        SolutionItem::Binding { symbol, value } => {
                            out.insert(symbol.clone());
                            value.collect_symbols(out);
                        }
                        SolutionItem::Interval {
                            symbol,
                            lower,
                            upper,
                        } => {
                            out.insert(symbol.clone());
                            if let Some(b) = lower {
                                b.value.collect_symbols(out);
                            }
                            if let Some(b) = upper {
                                b.value.collect_symbols(out);
                            }
                        }
                        SolutionItem::AllReals { symbol } => {
                            out.insert(symbol.clone());
                        }
                    }
                }
            }
        }
    }

    /// Replace every occurrence of the given symbols, leaving everything
    /// else untouched. Bindings are applied simultaneously.
    pub fn substitute_symbols(&self, bindings: &std::collections::BTreeMap<Symbol, Node>) -> Node {
        match self {
            Node::Rational(_) => self.clone(),
            Node::Symbol(s) => bindings.get(s).cloned().unwrap_or_else(|| self.clone()),
            Node::Sum(items) => Node::Sum(
                items
                    .iter()
                    .map(|n| n.substitute_symbols(bindings))
                    .collect(),
            ),
            Node::Product(items) => Node::Product(
                items
                    .iter()
                    .map(|n| n.substitute_symbols(bindings))
                    .collect(),
            ),
            Node::Power(a, b) => Node::Power(
                Box::new(a.substitute_symbols(bindings)),
                Box::new(b.substitute_symbols(bindings)),
            ),
            Node::Div(a, b) => Node::Div(
                Box::new(a.substitute_symbols(bindings)),
                Box::new(b.substitute_symbols(bindings)),
            ),
            Node::Neg(a) => Node::Neg(Box::new(a.substitute_symbols(bindings))),
            Node::Sqrt(a) => Node::Sqrt(Box::new(a.substitute_symbols(bindings))),
            Node::Relation { op, lhs, rhs } => Node::Relation {
                op: *op,
                lhs: Box::new(lhs.substitute_symbols(bindings)),
                rhs: Box::new(rhs.substitute_symbols(bindings)),
            },
            Node::Solutions(_) => self.clone(),
        }
    }
}

/// Classification an [`Expr`] derives from its root node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExprKind {
    Expression,
    Equation,
    Inequation,
    SolutionSet,
}

/// A parsed mathematical expression, equation, inequation, or solution set.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
}

impl Expr {
    /// Wrap a node. Callers are expected to respect the structural
    /// invariants (relations and solution sets only at the root); all
    /// constructors in this crate do.
    pub fn from_node(root: Node) -> Expr {
        Expr { root }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn into_root(self) -> Node {
        self.root
    }

    pub fn kind(&self) -> ExprKind {
        match &self.root {
            Node::Relation { op: RelOp::Eq, .. } => ExprKind::Equation,
            Node::Relation { .. } => ExprKind::Inequation,
            Node::Solutions(_) => ExprKind::SolutionSet,
            _ => ExprKind::Expression,
        }
    }

    /// Free symbols in lexicographic order.
    pub fn free_symbols(&self) -> Vec<Symbol> {
        let mut set = std::collections::BTreeSet::new();
        self.root.collect_symbols(&mut set);
        set.into_iter().collect()
    }

    pub fn solution_items(&self) -> Option<&[SolutionItem]> {
        match &self.root {
            Node::Solutions(items) => Some(items),
            _ => None,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        printer::write_node(f, &self.root)
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Expr, ParseError> {
        parse(s)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Expr, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse(&text).map_err(|e| D::Error::custom(format!("invalid expression {text:?}: {e}")))
    }
}
