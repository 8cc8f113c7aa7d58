//! Recursive-descent parser for the surface notation.
//!
//! Precedence, tightest first: `^` (right associative), unary minus,
//! implicit multiplication (juxtaposition), explicit `*` and `/`,
//! `+`/`-`, relations. Implicit multiplication binds tighter than
//! explicit division, so `3/2x` is `3/(2x)` and `2b(y-1)` is `2*b*(y-1)`.

use thiserror::Error;

use super::lexer::{lex, Lexeme, Tok};
use super::{Bound, Expr, Node, RelOp, SolutionItem, Symbol};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("unsupported construct `{construct}` at offset {position}")]
    UnsupportedConstruct { construct: String, position: usize },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::SyntaxError { position, .. }
            | ParseError::UnsupportedConstruct { position, .. } => *position,
        }
    }
}

/// Parse a math string into an [`Expr`].
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let lexemes = lex(text)?;
    if lexemes.is_empty() {
        return Err(ParseError::SyntaxError {
            position: 0,
            message: "empty input".into(),
        });
    }
    let mut parser = Parser {
        lexemes,
        index: 0,
        end: text.len(),
    };
    let root = if parser.peek_is(|t| matches!(t, Tok::LBracket)) {
        parser.parse_solution_set()?
    } else {
        parser.parse_top_relation()?
    };
    if let Some(lexeme) = parser.current() {
        return Err(ParseError::SyntaxError {
            position: lexeme.pos,
            message: format!("expected end of input, found {}", lexeme.tok.describe()),
        });
    }
    Ok(Expr::from_node(root))
}

struct Parser {
    lexemes: Vec<Lexeme>,
    index: usize,
    end: usize,
}

impl Parser {
    fn current(&self) -> Option<&Lexeme> {
        self.lexemes.get(self.index)
    }

    fn peek_is(&self, pred: impl Fn(&Tok) -> bool) -> bool {
        self.current().is_some_and(|l| pred(&l.tok))
    }

    fn advance(&mut self) -> Option<Lexeme> {
        let lexeme = self.lexemes.get(self.index).cloned();
        if lexeme.is_some() {
            self.index += 1;
        }
        lexeme
    }

    fn here(&self) -> usize {
        self.current().map_or(self.end, |l| l.pos)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::SyntaxError {
            position: self.here(),
            message: message.into(),
        }
    }

    fn expect(&mut self, want: Tok, context: &str) -> Result<(), ParseError> {
        match self.current() {
            Some(l) if l.tok == want => {
                self.index += 1;
                Ok(())
            }
            Some(l) => Err(ParseError::SyntaxError {
                position: l.pos,
                message: format!(
                    "expected {} {context}, found {}",
                    want.describe(),
                    l.tok.describe()
                ),
            }),
            None => Err(ParseError::SyntaxError {
                position: self.end,
                message: format!("expected {} {context}, found end of input", want.describe()),
            }),
        }
    }

    fn parse_top_relation(&mut self) -> Result<Node, ParseError> {
        let lhs = self.parse_sum()?;
        if let Some(Tok::Rel(op)) = self.current().map(|l| l.tok.clone()) {
            self.advance();
            let rhs = self.parse_sum()?;
            if self.peek_is(|t| matches!(t, Tok::Rel(_))) {
                return Err(self.error(
                    "chained relations are only allowed inside solution sets, e.g. [1<x<3]",
                ));
            }
            return Ok(Node::relation(op, lhs, rhs));
        }
        Ok(lhs)
    }

    fn parse_sum(&mut self) -> Result<Node, ParseError> {
        let mut terms = vec![self.parse_term()?];
        loop {
            match self.current().map(|l| &l.tok) {
                Some(Tok::Plus) => {
                    self.advance();
                    terms.push(self.parse_term()?);
                }
                Some(Tok::Minus) => {
                    self.advance();
                    terms.push(Node::neg(self.parse_term()?));
                }
                _ => break,
            }
        }
        Ok(Node::sum(terms))
    }

    fn parse_term(&mut self) -> Result<Node, ParseError> {
        let mut current = self.parse_juxtaposition()?;
        loop {
            match self.current().map(|l| &l.tok) {
                Some(Tok::Star) => {
                    self.advance();
                    let rhs = self.parse_juxtaposition()?;
                    current = match current {
                        Node::Product(mut v) => {
                            v.push(rhs);
                            Node::Product(v)
                        }
                        other => Node::Product(vec![other, rhs]),
                    };
                }
                Some(Tok::Slash) => {
                    self.advance();
                    let rhs = self.parse_juxtaposition()?;
                    current = Node::div(current, rhs);
                }
                _ => break,
            }
        }
        Ok(current)
    }

    fn starts_juxtaposed_factor(&self) -> bool {
        self.peek_is(|t| matches!(t, Tok::Sym(_) | Tok::LParen | Tok::Frac | Tok::Sqrt))
    }

    fn parse_juxtaposition(&mut self) -> Result<Node, ParseError> {
        let mut factors = vec![self.parse_prefix()?];
        while self.starts_juxtaposed_factor() {
            factors.push(self.parse_power()?);
        }
        Ok(Node::product(factors))
    }

    fn parse_prefix(&mut self) -> Result<Node, ParseError> {
        if self.peek_is(|t| matches!(t, Tok::Minus)) {
            self.advance();
            return Ok(Node::neg(self.parse_prefix()?));
        }
        self.parse_power()
    }

    fn parse_power(&mut self) -> Result<Node, ParseError> {
        let base = self.parse_atom()?;
        if self.peek_is(|t| matches!(t, Tok::Caret)) {
            self.advance();
            let exponent = self.parse_prefix()?;
            return Ok(Node::power(base, exponent));
        }
        Ok(base)
    }

    fn parse_atom(&mut self) -> Result<Node, ParseError> {
        let Some(lexeme) = self.advance() else {
            return Err(ParseError::SyntaxError {
                position: self.end,
                message: "expected an expression, found end of input".into(),
            });
        };
        match lexeme.tok {
            Tok::Number(value) => Ok(Node::Rational(value)),
            Tok::Sym(name) => Ok(Node::Symbol(Symbol::new(name))),
            Tok::LParen => {
                let inner = self.parse_sum()?;
                self.expect(Tok::RParen, "to close `(`")?;
                Ok(inner)
            }
            Tok::LBrace => {
                let inner = self.parse_sum()?;
                self.expect(Tok::RBrace, "to close `{`")?;
                Ok(inner)
            }
            Tok::Frac => {
                self.expect(Tok::LBrace, "after `\\frac`")?;
                let numerator = self.parse_sum()?;
                self.expect(Tok::RBrace, "to close the numerator")?;
                self.expect(Tok::LBrace, "for the denominator")?;
                let denominator = self.parse_sum()?;
                self.expect(Tok::RBrace, "to close the denominator")?;
                Ok(Node::div(numerator, denominator))
            }
            Tok::Sqrt => {
                if self.peek_is(|t| matches!(t, Tok::LParen)) {
                    self.advance();
                    let inner = self.parse_sum()?;
                    self.expect(Tok::RParen, "to close `\\sqrt(`")?;
                    Ok(Node::sqrt(inner))
                } else {
                    self.expect(Tok::LBrace, "after `\\sqrt`")?;
                    let inner = self.parse_sum()?;
                    self.expect(Tok::RBrace, "to close `\\sqrt{`")?;
                    Ok(Node::sqrt(inner))
                }
            }
            Tok::LBracket => Err(ParseError::SyntaxError {
                position: lexeme.pos,
                message: "solution sets may only appear at the top level".into(),
            }),
            other => Err(ParseError::SyntaxError {
                position: lexeme.pos,
                message: format!("expected an expression, found {}", other.describe()),
            }),
        }
    }

    fn parse_solution_set(&mut self) -> Result<Node, ParseError> {
        self.expect(Tok::LBracket, "to open a solution set")?;
        let mut items = Vec::new();
        if self.peek_is(|t| matches!(t, Tok::RBracket)) {
            self.advance();
            return Ok(Node::Solutions(items));
        }
        loop {
            items.push(self.parse_solution_item()?);
            match self.current().map(|l| &l.tok) {
                Some(Tok::Comma) => {
                    self.advance();
                }
                Some(Tok::RBracket) => {
                    self.advance();
                    break;
                }
                _ => {
                    return Err(
                        self.error("expected `,` or `]` after a solution-set item")
                    )
                }
            }
        }
        Ok(Node::Solutions(items))
    }

    fn parse_solution_item(&mut self) -> Result<SolutionItem, ParseError> {
        let first = self.parse_sum()?;
        if self.peek_is(|t| matches!(t, Tok::In)) {
            self.advance();
            let pos = self.here();
            let domain = self.parse_sum()?;
            let Node::Symbol(symbol) = first else {
                return Err(ParseError::SyntaxError {
                    position: pos,
                    message: "`\\in` constraints need a symbol on the left".into(),
                });
            };
            if !matches!(&domain, Node::Symbol(s) if s.name() == "R") {
                return Err(ParseError::SyntaxError {
                    position: pos,
                    message: "the only supported domain is `R`".into(),
                });
            }
            return Ok(SolutionItem::AllReals { symbol });
        }
        let Some(Tok::Rel(op1)) = self.current().map(|l| l.tok.clone()) else {
            return Err(self.error("expected a binding like `x=1` or an interval like `x>2`"));
        };
        self.advance();
        let second = self.parse_sum()?;
        if let Some(Tok::Rel(op2)) = self.current().map(|l| l.tok.clone()) {
            // Chained form `lo < x < hi` (or the mirrored `hi > x > lo`).
            let pos = self.here();
            self.advance();
            let third = self.parse_sum()?;
            let Node::Symbol(symbol) = second else {
                return Err(ParseError::SyntaxError {
                    position: pos,
                    message: "a chained interval needs the symbol in the middle".into(),
                });
            };
            let make = |value: Node, op: RelOp| Bound {
                value,
                inclusive: matches!(op, RelOp::Le | RelOp::Ge),
            };
            match (op1, op2) {
                (RelOp::Lt | RelOp::Le, RelOp::Lt | RelOp::Le) => Ok(SolutionItem::Interval {
                    symbol,
                    lower: Some(make(first, op1)),
                    upper: Some(make(third, op2)),
                }),
                (RelOp::Gt | RelOp::Ge, RelOp::Gt | RelOp::Ge) => Ok(SolutionItem::Interval {
                    symbol,
                    lower: Some(make(third, op2)),
                    upper: Some(make(first, op1)),
                }),
                _ => Err(ParseError::SyntaxError {
                    position: pos,
                    message: "a chained interval must point one way, e.g. [1<x<3]".into(),
                }),
            }
        } else {
            match op1 {
                RelOp::Eq => {
                    let Node::Symbol(symbol) = first else {
                        return Err(self.error(
                            "solution sets contain only symbol bindings and intervals",
                        ));
                    };
                    Ok(SolutionItem::Binding {
                        symbol,
                        value: second,
                    })
                }
                op => {
                    let bound_from = |value: Node, inclusive: bool| Bound { value, inclusive };
                    match (first, second) {
                        (Node::Symbol(symbol), value) => {
                            let inclusive = matches!(op, RelOp::Le | RelOp::Ge);
                            Ok(match op {
                                RelOp::Lt | RelOp::Le => SolutionItem::Interval {
                                    symbol,
                                    lower: None,
                                    upper: Some(bound_from(value, inclusive)),
                                },
                                _ => SolutionItem::Interval {
                                    symbol,
                                    lower: Some(bound_from(value, inclusive)),
                                    upper: None,
                                },
                            })
                        }
                        (value, Node::Symbol(symbol)) => {
                            let inclusive = matches!(op, RelOp::Le | RelOp::Ge);
                            Ok(match op {
                                RelOp::Lt | RelOp::Le => SolutionItem::Interval {
                                    symbol,
                                    lower: Some(bound_from(value, inclusive)),
                                    upper: None,
                                },
                                _ => SolutionItem::Interval {
                                    symbol,
                                    lower: None,
                                    upper: Some(bound_from(value, inclusive)),
                                },
                            })
                        }
                        _ => Err(self.error(
                            "an interval constraint needs a symbol on one side",
                        )),
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::ExprKind;
    use super::*;

    fn p(text: &str) -> Expr {
        parse(text).unwrap_or_else(|e| panic!("parse({text:?}): {e}"))
    }

    #[test]
    fn table_style_equation_shape() {
        let e = p("a(y-1)+2b(y-1)=3");
        assert_eq!(e.kind(), ExprKind::Equation);
        let Node::Relation { op, lhs, .. } = e.root() else {
            panic!("expected relation at root");
        };
        assert_eq!(*op, RelOp::Eq);
        let Node::Sum(terms) = lhs.as_ref() else {
            panic!("lhs should be a sum, got {lhs:?}");
        };
        assert_eq!(terms.len(), 2);
        assert!(matches!(terms[0], Node::Product(_)));
        assert!(matches!(terms[1], Node::Product(_)));
    }

    #[test]
    fn frac_coefficient_is_implicit_product() {
        let e = p("\\frac{1}{2}x");
        let Node::Product(factors) = e.root() else {
            panic!("expected product, got {:?}", e.root());
        };
        assert_eq!(factors[0], Node::rational(1, 2));
        assert_eq!(factors[1], Node::symbol("x"));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse("x +* 2").unwrap_err();
        assert_eq!(err.position(), 3);
        assert!(matches!(err, ParseError::SyntaxError { .. }));
    }

    #[test]
    fn unsupported_construct() {
        let err = parse("\\int x").unwrap_err();
        assert!(
            matches!(&err, ParseError::UnsupportedConstruct { construct, .. } if construct == "\\int")
        );
    }

    #[test]
    fn power_is_right_associative_and_tight() {
        assert_eq!(
            p("2^3^2").root(),
            &Node::power(Node::int(2), Node::power(Node::int(3), Node::int(2)))
        );
        // Unary minus binds looser than `^`.
        assert_eq!(
            p("-x^2").root(),
            &Node::Neg(Box::new(Node::power(Node::symbol("x"), Node::int(2))))
        );
        // Implicit multiplication binds looser than `^`.
        assert_eq!(
            p("x^2y").root(),
            &Node::Product(vec![
                Node::power(Node::symbol("x"), Node::int(2)),
                Node::symbol("y"),
            ])
        );
    }

    #[test]
    fn implicit_multiplication_binds_tighter_than_division() {
        // 3/2x = 3/(2x)
        assert_eq!(
            p("3/2x").root(),
            &Node::div(
                Node::int(3),
                Node::Product(vec![Node::int(2), Node::symbol("x")])
            )
        );
    }

    #[test]
    fn leading_minus_folds_into_constants() {
        assert_eq!(p("-2x"), p("-2 x"));
        let parsed = p("-2x");
        let Node::Product(factors) = parsed.root() else {
            panic!("expected product");
        };
        assert_eq!(factors[0], Node::int(-2));
        assert_eq!(p("-\\frac{1}{2}").root(), &Node::rational(-1, 2));
    }

    #[test]
    fn subscripted_symbols() {
        assert_eq!(p("x_1").root(), &Node::symbol("x_1"));
        assert_eq!(p("x_{12}").root(), &Node::symbol("x_12"));
    }

    #[test]
    fn solution_sets() {
        let e = p("[k=-\\frac{1}{2}]");
        assert_eq!(e.kind(), ExprKind::SolutionSet);
        assert_eq!(
            e.solution_items().unwrap(),
            &[SolutionItem::Binding {
                symbol: Symbol::new("k"),
                value: Node::rational(-1, 2),
            }]
        );
        assert_eq!(p("[]").solution_items().unwrap().len(), 0);
        let interval = p("[1<x<3]");
        assert!(matches!(
            &interval.solution_items().unwrap()[0],
            SolutionItem::Interval {
                lower: Some(_),
                upper: Some(_),
                ..
            }
        ));
        let all = p("[x \\in R]");
        assert!(matches!(
            &all.solution_items().unwrap()[0],
            SolutionItem::AllReals { .. }
        ));
    }

    #[test]
    fn dollar_signs_are_transparent() {
        assert_eq!(p("$2k+1=0$"), p("2k+1=0"));
    }

    #[test]
    fn chained_relation_outside_sets_is_rejected() {
        assert!(parse("0<x<3").is_err());
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(parse("").is_err());
        assert!(parse("  $ $ ").is_err());
    }
}
