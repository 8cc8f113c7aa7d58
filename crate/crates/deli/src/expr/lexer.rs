//! Tokenizer for the LaTeX-subset surface notation.
//!
//! Whitespace and `$` delimiters are transparent, so fragments lifted
//! straight out of model output (`$2k+1=0$`) lex the same as plain text.

use num::bigint::BigInt;
use num::BigRational;

use super::parser::ParseError;
use super::RelOp;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Number(BigRational),
    Sym(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Rel(RelOp),
    /// `\in`, used by the `x \in R` solution-set form.
    In,
    Frac,
    Sqrt,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Number(_) => "a number".into(),
            Tok::Sym(s) => format!("symbol `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Rel(op) => format!("`{}`", op.as_str()),
            Tok::In => "`\\in`".into(),
            Tok::Frac => "`\\frac`".into(),
            Tok::Sqrt => "`\\sqrt`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Lexeme {
    pub tok: Tok,
    pub pos: usize,
}

pub fn lex(text: &str) -> Result<Vec<Lexeme>, ParseError> {
    let bytes: Vec<char> = text.chars().collect();
    let offsets: Vec<usize> = text.char_indices().map(|(i, _)| i).collect();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let c = bytes[i];
        let pos = offsets[i];
        match c {
            ' ' | '\t' | '\n' | '\r' | '$' => {
                i += 1;
            }
            '+' => {
                out.push(Lexeme { tok: Tok::Plus, pos });
                i += 1;
            }
            '-' | '\u{2212}' => {
                out.push(Lexeme {
                    tok: Tok::Minus,
                    pos,
                });
                i += 1;
            }
            '*' => {
                // `**` is accepted as a power operator for robustness
                // against Python-style model output.
                if bytes.get(i + 1) == Some(&'*') {
                    out.push(Lexeme {
                        tok: Tok::Caret,
                        pos,
                    });
                    i += 2;
                } else {
                    out.push(Lexeme { tok: Tok::Star, pos });
                    i += 1;
                }
            }
            '\u{00b7}' | '\u{00d7}' => {
                out.push(Lexeme { tok: Tok::Star, pos });
                i += 1;
            }
            '/' => {
                out.push(Lexeme {
                    tok: Tok::Slash,
                    pos,
                });
                i += 1;
            }
            '^' => {
                out.push(Lexeme {
                    tok: Tok::Caret,
                    pos,
                });
                i += 1;
            }
            '(' => {
                out.push(Lexeme {
                    tok: Tok::LParen,
                    pos,
                });
                i += 1;
            }
            ')' => {
                out.push(Lexeme {
                    tok: Tok::RParen,
                    pos,
                });
                i += 1;
            }
            '{' => {
                out.push(Lexeme {
                    tok: Tok::LBrace,
                    pos,
                });
                i += 1;
            }
            '}' => {
                out.push(Lexeme {
                    tok: Tok::RBrace,
                    pos,
                });
                i += 1;
            }
            '[' => {
                out.push(Lexeme {
                    tok: Tok::LBracket,
                    pos,
                });
                i += 1;
            }
            ']' => {
                out.push(Lexeme {
                    tok: Tok::RBracket,
                    pos,
                });
                i += 1;
            }
            ',' => {
                out.push(Lexeme {
                    tok: Tok::Comma,
                    pos,
                });
                i += 1;
            }
            '=' => {
                out.push(Lexeme {
                    tok: Tok::Rel(RelOp::Eq),
                    pos,
                });
                i += 1;
            }
            '<' => {
                if bytes.get(i + 1) == Some(&'=') {
                    out.push(Lexeme {
                        tok: Tok::Rel(RelOp::Le),
                        pos,
                    });
                    i += 2;
                } else {
                    out.push(Lexeme {
                        tok: Tok::Rel(RelOp::Lt),
                        pos,
                    });
                    i += 1;
                }
            }
            '>' => {
                if bytes.get(i + 1) == Some(&'=') {
                    out.push(Lexeme {
                        tok: Tok::Rel(RelOp::Ge),
                        pos,
                    });
                    i += 2;
                } else {
                    out.push(Lexeme {
                        tok: Tok::Rel(RelOp::Gt),
                        pos,
                    });
                    i += 1;
                }
            }
            '\u{2264}' => {
                out.push(Lexeme {
                    tok: Tok::Rel(RelOp::Le),
                    pos,
                });
                i += 1;
            }
            '\u{2265}' => {
                out.push(Lexeme {
                    tok: Tok::Rel(RelOp::Ge),
                    pos,
                });
                i += 1;
            }
            '\u{2208}' => {
                out.push(Lexeme { tok: Tok::In, pos });
                i += 1;
            }
            '\\' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j].is_ascii_alphabetic() {
                    j += 1;
                }
                let name: String = bytes[i + 1..j].iter().collect();
                let tok = match name.as_str() {
                    "frac" | "dfrac" | "tfrac" => Some(Tok::Frac),
                    "sqrt" => Some(Tok::Sqrt),
                    "le" | "leq" | "leqslant" => Some(Tok::Rel(RelOp::Le)),
                    "ge" | "geq" | "geqslant" => Some(Tok::Rel(RelOp::Ge)),
                    "lt" => Some(Tok::Rel(RelOp::Lt)),
                    "gt" => Some(Tok::Rel(RelOp::Gt)),
                    "cdot" | "times" => Some(Tok::Star),
                    "in" => Some(Tok::In),
                    // Purely presentational markup is transparent.
                    "left" | "right" | "," | "" => None,
                    _ => {
                        return Err(ParseError::UnsupportedConstruct {
                            construct: format!("\\{name}"),
                            position: pos,
                        })
                    }
                };
                if name.is_empty() {
                    // A lone backslash (or `\,` spacing) is skipped.
                    i += 1;
                    if bytes.get(i) == Some(&',') {
                        i += 1;
                    }
                } else {
                    if let Some(tok) = tok {
                        out.push(Lexeme { tok, pos });
                    }
                    i = j;
                }
            }
            c if c.is_ascii_digit() => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                let mut int_part: String = bytes[i..j].iter().collect();
                let mut denom = BigInt::from(1);
                if j < bytes.len()
                    && bytes[j] == '.'
                    && bytes.get(j + 1).is_some_and(|c| c.is_ascii_digit())
                {
                    let mut k = j + 1;
                    while k < bytes.len() && bytes[k].is_ascii_digit() {
                        k += 1;
                    }
                    let frac_digits = k - (j + 1);
                    int_part.extend(bytes[j + 1..k].iter());
                    denom = BigInt::from(10u32).pow(frac_digits as u32);
                    j = k;
                }
                let numer: BigInt = int_part.parse().expect("digits only");
                out.push(Lexeme {
                    tok: Tok::Number(BigRational::new(numer, denom)),
                    pos,
                });
                i = j;
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                name.push(c);
                let mut j = i + 1;
                if j < bytes.len() && bytes[j] == '_' {
                    j += 1;
                    if j < bytes.len() && bytes[j] == '{' {
                        j += 1;
                        let mut sub = String::new();
                        while j < bytes.len() && bytes[j] != '}' {
                            if !bytes[j].is_ascii_alphanumeric() {
                                return Err(ParseError::SyntaxError {
                                    position: offsets[j],
                                    message: "subscripts may contain only letters and digits"
                                        .into(),
                                });
                            }
                            sub.push(bytes[j]);
                            j += 1;
                        }
                        if j == bytes.len() {
                            return Err(ParseError::SyntaxError {
                                position: text.len(),
                                message: "unterminated subscript".into(),
                            });
                        }
                        j += 1; // consume '}'
                        if sub.is_empty() {
                            return Err(ParseError::SyntaxError {
                                position: offsets[j - 1],
                                message: "empty subscript".into(),
                            });
                        }
                        name.push('_');
                        name.push_str(&sub);
                    } else if j < bytes.len() && bytes[j].is_ascii_alphanumeric() {
                        // LaTeX convention: an unbraced subscript is one
                        // character.
                        name.push('_');
                        name.push(bytes[j]);
                        j += 1;
                    } else {
                        return Err(ParseError::SyntaxError {
                            position: offsets[i] + 1,
                            message: "expected a subscript after `_`".into(),
                        });
                    }
                }
                out.push(Lexeme {
                    tok: Tok::Sym(name),
                    pos,
                });
                i = j;
            }
            other => {
                return Err(ParseError::SyntaxError {
                    position: pos,
                    message: format!("unexpected character `{other}`"),
                });
            }
        }
    }
    Ok(out)
}
