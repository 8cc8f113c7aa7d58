//! The tool interface set: twelve named, documented operations over the
//! expression core, invocable by name from model-emitted actions through
//! a uniform registry.
//!
//! Every interface failure is a structured error rendered as feedback
//! text for the model; invocation never aborts an enclosing deliberation.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{parse, Expr, ParseError, Symbol};
use crate::gateway::{ChatRequest, Gateway, GatewayError, Message};

mod factoring;
mod ops;
mod solve;

pub(crate) use factoring::factor_poly;

/// One interface invocation as parsed from model output. Arguments are
/// preserved verbatim so error feedback can quote them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub name: String,
    /// Arguments split at top-level commas, verbatim.
    pub args: Vec<String>,
    /// The unsplit text between the parentheses.
    pub raw_inner: String,
    /// Byte span of the action in the model output segment.
    pub span: (usize, usize),
    /// Set when no well-formed action could be recognized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub malformed: Option<String>,
}

impl Action {
    pub fn call(name: impl Into<String>, args: Vec<String>) -> Action {
        let raw_inner = args.join(", ");
        Action {
            name: name.into(),
            args,
            raw_inner,
            span: (0, 0),
            malformed: None,
        }
    }

    pub fn malformed(reason: impl Into<String>, span: (usize, usize)) -> Action {
        Action {
            name: String::new(),
            args: Vec::new(),
            raw_inner: String::new(),
            span,
            malformed: Some(reason.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Category {
    NumericalComputation,
    EquationSolving,
    ExpressionTransformation,
    Thinking,
}

/// Static description of one interface: name, argument roles, usage text
/// with a worked example, and its category.
#[derive(Debug, Clone)]
pub struct InterfaceDescriptor {
    pub name: &'static str,
    pub args_sig: &'static str,
    pub output_sig: &'static str,
    pub description: &'static str,
    pub category: Category,
    pub example_call: &'static str,
    pub example_output: &'static str,
    pub min_args: usize,
    pub max_args: usize,
}

impl InterfaceDescriptor {
    /// Render in the prompt convention
    /// `name(args) -> output: description. e.g. example -> result`.
    pub fn docstring(&self) -> String {
        format!(
            "{}({}) -> {}: {} e.g. {} -> {}",
            self.name,
            self.args_sig,
            self.output_sig,
            self.description,
            self.example_call,
            self.example_output
        )
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InterfaceError {
    #[error("the expression still contains free symbols")]
    NonNumeric { symbols: Vec<Symbol> },
    #[error("bad condition: {0}")]
    BadCondition(String),
    #[error("unsupported degree {degree}")]
    UnsupportedDegree { degree: u32, detail: String },
    #[error("not univariate")]
    NotUnivariate { symbols: Vec<Symbol> },
    #[error("symbol `{symbol}` does not occur in the equation")]
    SymbolAbsent { symbol: Symbol },
    #[error("not a rational form: {0}")]
    NonRationalForm(String),
    #[error("not a polynomial: {0}")]
    NonPolynomial(String),
    #[error("not a quadratic: {0}")]
    NotQuadratic(String),
    #[error("the system is inconsistent")]
    Inconsistent,
    #[error("the system is not linear: {0}")]
    NonLinearSystem(String),
    #[error("unknown interface `{name}`")]
    UnknownInterface { name: String },
    #[error("`{name}` expects {expected} arguments, got {got}")]
    ArityMismatch {
        name: String,
        expected: String,
        got: usize,
    },
    #[error("argument `{argument}` failed to parse")]
    Parse { argument: String, source: ParseError },
    #[error("malformed action: {0}")]
    MalformedAction(String),
    #[error(transparent)]
    Gateway(#[from] GatewayError),
}

impl InterfaceError {
    pub fn code(&self) -> &'static str {
        match self {
            InterfaceError::NonNumeric { .. } => "NonNumeric",
            InterfaceError::BadCondition(_) => "BadCondition",
            InterfaceError::UnsupportedDegree { .. } => "UnsupportedDegree",
            InterfaceError::NotUnivariate { .. } => "NotUnivariate",
            InterfaceError::SymbolAbsent { .. } => "SymbolAbsent",
            InterfaceError::NonRationalForm(_) => "NonRationalForm",
            InterfaceError::NonPolynomial(_) => "NonPolynomial",
            InterfaceError::NotQuadratic(_) => "NotQuadratic",
            InterfaceError::Inconsistent => "Inconsistent",
            InterfaceError::NonLinearSystem(_) => "NonLinearSystem",
            InterfaceError::UnknownInterface { .. } => "UnknownInterface",
            InterfaceError::ArityMismatch { .. } => "ArityMismatch",
            InterfaceError::Parse { .. } => "SyntaxError",
            InterfaceError::MalformedAction(_) => "MalformedAction",
            InterfaceError::Gateway(_) => "GatewayError",
        }
    }

    /// Feedback text written for the model: name the problem and point at
    /// a way forward.
    pub fn model_message(&self) -> String {
        match self {
            InterfaceError::NonNumeric { symbols } => format!(
                "the expression still contains the free symbols {{{}}}; substitute({{c}}) known conditions first, or use partial_solve to express one symbol",
                join_symbols(symbols)
            ),
            InterfaceError::BadCondition(detail) => format!(
                "{detail}; conditions must bind a symbol, like x=1"
            ),
            InterfaceError::UnsupportedDegree { degree, detail } => format!(
                "{detail} (degree {degree}); this solver handles linear and quadratic forms, and higher degrees only when they factor"
            ),
            InterfaceError::NotUnivariate { symbols } => format!(
                "the input involves several unknowns {{{}}}; use partial_solve(e, u) to solve for one of them, or solve_multi_eq for a system",
                join_symbols(symbols)
            ),
            InterfaceError::SymbolAbsent { symbol } => format!(
                "the symbol {symbol} does not occur in the equation; pick one of its free symbols"
            ),
            InterfaceError::NonRationalForm(detail) => format!(
                "{detail}; this interface handles polynomials and ratios of polynomials"
            ),
            InterfaceError::NonPolynomial(detail) => format!(
                "{detail}; expand(e) may help produce a polynomial first"
            ),
            InterfaceError::NotQuadratic(detail) => format!(
                "{detail}; complete_the_square needs a univariate quadratic like x^2 + 2x + 3"
            ),
            InterfaceError::Inconsistent => {
                "the system has no solution; its equations contradict each other".into()
            }
            InterfaceError::NonLinearSystem(detail) => format!(
                "{detail}; solve_multi_eq handles linear systems, use solve_eq for a single nonlinear equation"
            ),
            InterfaceError::UnknownInterface { name } => format!(
                "unknown interface `{name}`; available interfaces: calculate, substitute, solve_eq, solve_ineq, solve_multi_eq, solve_multi_ineq, partial_solve, expand, factor, collect, complete_the_square, think"
            ),
            InterfaceError::ArityMismatch {
                name,
                expected,
                got,
            } => format!("{name} expects {expected} argument(s) but received {got}"),
            InterfaceError::Parse { argument, source } => format!(
                "could not parse `{argument}`: {source}"
            ),
            InterfaceError::MalformedAction(reason) => format!(
                "{reason}; write `Action: name(arg1, arg2)` to invoke an interface or `Answer: ...` to finish"
            ),
            InterfaceError::Gateway(e) => format!("the thinking backend failed: {e}"),
        }
    }

    pub fn is_retriable(&self) -> bool {
        matches!(self, InterfaceError::Gateway(e) if e.retriable())
    }
}

fn join_symbols(symbols: &[Symbol]) -> String {
    symbols
        .iter()
        .map(|s| s.name().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Successful interface output: an expression (solution sets included)
/// or free text from `think`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InvokeOutput {
    Expr(Expr),
    Text(String),
}

/// Exactly one of `ok`/`error` holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvocationResult {
    Ok(InvokeOutput),
    Error { code: String, message: String },
}

impl InvocationResult {
    pub fn ok_expr(expr: Expr) -> InvocationResult {
        InvocationResult::Ok(InvokeOutput::Expr(expr))
    }

    pub fn ok_text(text: impl Into<String>) -> InvocationResult {
        InvocationResult::Ok(InvokeOutput::Text(text.into()))
    }

    pub fn from_error(error: &InterfaceError) -> InvocationResult {
        InvocationResult::Error {
            code: error.code().to_string(),
            message: error.model_message(),
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, InvocationResult::Ok(_))
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            InvocationResult::Ok(InvokeOutput::Expr(e)) => Some(e),
            _ => None,
        }
    }

    /// The text that follows `Output: ` in a transcript.
    pub fn render(&self) -> String {
        match self {
            InvocationResult::Ok(InvokeOutput::Expr(e)) => e.to_string(),
            InvocationResult::Ok(InvokeOutput::Text(t)) => t.clone(),
            InvocationResult::Error { message, .. } => format!("Error: {message}"),
        }
    }
}

/// Immutable interface registry; shareable across threads. `think` needs
/// a gateway, every other interface is pure.
pub struct Registry {
    descriptors: Vec<InterfaceDescriptor>,
    gateway: Option<Arc<Gateway>>,
    model: String,
}

impl Registry {
    /// Registry without a model behind `think`.
    pub fn standalone() -> Registry {
        Registry {
            descriptors: descriptor_table(),
            gateway: None,
            model: String::new(),
        }
    }

    pub fn with_gateway(gateway: Arc<Gateway>, model: impl Into<String>) -> Registry {
        Registry {
            descriptors: descriptor_table(),
            gateway: Some(gateway),
            model: model.into(),
        }
    }

    pub fn descriptors(&self) -> &[InterfaceDescriptor] {
        &self.descriptors
    }

    pub fn descriptor(&self, name: &str) -> Option<&InterfaceDescriptor> {
        self.descriptors.iter().find(|d| d.name == name)
    }

    /// All docstrings, one per line, in table order; this is the
    /// interface section every prompt embeds.
    pub fn render_docs(&self) -> String {
        self.descriptors
            .iter()
            .map(InterfaceDescriptor::docstring)
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Dispatch an action. Total: every input produces an
    /// [`InvocationResult`], never a panic or an abort.
    pub fn invoke(&self, action: &Action) -> InvocationResult {
        match self.try_invoke(action) {
            Ok(result) => result,
            Err(error) => InvocationResult::from_error(&error),
        }
    }

    fn try_invoke(&self, action: &Action) -> Result<InvocationResult, InterfaceError> {
        if let Some(reason) = &action.malformed {
            return Err(InterfaceError::MalformedAction(reason.clone()));
        }
        let descriptor = self
            .descriptor(&action.name)
            .ok_or_else(|| InterfaceError::UnknownInterface {
                name: action.name.clone(),
            })?;
        let got = action.args.len();
        if got < descriptor.min_args || got > descriptor.max_args {
            let expected = if descriptor.min_args == descriptor.max_args {
                descriptor.min_args.to_string()
            } else if descriptor.max_args == usize::MAX {
                format!("at least {}", descriptor.min_args)
            } else {
                format!("{} to {}", descriptor.min_args, descriptor.max_args)
            };
            return Err(InterfaceError::ArityMismatch {
                name: action.name.clone(),
                expected,
                got,
            });
        }
        let out = match action.name.as_str() {
            "calculate" => ops::calculate(&parse_arg(&action.args[0])?)?,
            "substitute" => {
                let target = parse_arg(&action.args[0])?;
                let conditions = action.args[1..]
                    .iter()
                    .map(|a| parse_arg(a))
                    .collect::<Result<Vec<_>, _>>()?;
                ops::substitute(&target, &conditions)?
            }
            "solve_eq" => solve::solve_eq(&parse_arg(&action.args[0])?)?,
            "solve_ineq" => solve::solve_ineq(&parse_arg(&action.args[0])?)?,
            "solve_multi_eq" => {
                let eqs = action
                    .args
                    .iter()
                    .map(|a| parse_arg(a))
                    .collect::<Result<Vec<_>, _>>()?;
                solve::solve_multi_eq(&eqs)?
            }
            "solve_multi_ineq" => {
                let ineqs = action
                    .args
                    .iter()
                    .map(|a| parse_arg(a))
                    .collect::<Result<Vec<_>, _>>()?;
                solve::solve_multi_ineq(&ineqs)?
            }
            "partial_solve" => {
                let equation = parse_arg(&action.args[0])?;
                let unknown = parse_symbol_arg(&action.args[1])?;
                solve::partial_solve(&equation, &unknown)?
            }
            "expand" => ops::expand(&parse_arg(&action.args[0])?)?,
            "factor" => ops::factor(&parse_arg(&action.args[0])?)?,
            "collect" => {
                let target = parse_arg(&action.args[0])?;
                let symbol = parse_symbol_arg(&action.args[1])?;
                ops::collect(&target, &symbol)?
            }
            "complete_the_square" => ops::complete_the_square(&parse_arg(&action.args[0])?)?,
            "think" => return self.think(&action.raw_inner).map(InvocationResult::ok_text),
            _ => unreachable!("descriptor table and dispatch are in sync"),
        };
        Ok(InvocationResult::ok_expr(out))
    }

    /// Route a thought to the model as a single-turn conclusion request;
    /// the response is returned verbatim.
    pub fn think(&self, thought: &str) -> Result<String, InterfaceError> {
        let gateway = self.gateway.as_ref().ok_or_else(|| {
            InterfaceError::Gateway(GatewayError::Unconfigured(
                "think needs a model gateway; this registry is standalone".into(),
            ))
        })?;
        let request = ChatRequest::new(self.model.clone(), vec![Message::user(thought)]);
        Ok(gateway.complete(&request)?)
    }
}

fn parse_arg(argument: &str) -> Result<Expr, InterfaceError> {
    parse(argument).map_err(|source| InterfaceError::Parse {
        argument: argument.trim().to_string(),
        source,
    })
}

fn parse_symbol_arg(argument: &str) -> Result<Symbol, InterfaceError> {
    let expr = parse_arg(argument)?;
    match expr.root() {
        crate::expr::Node::Symbol(s) => Ok(s.clone()),
        _ => Err(InterfaceError::BadCondition(format!(
            "`{}` is not a symbol",
            argument.trim()
        ))),
    }
}

fn descriptor_table() -> Vec<InterfaceDescriptor> {
    vec![
        InterfaceDescriptor {
            name: "calculate",
            args_sig: "expression: str",
            output_sig: "value: str",
            description: "Calculate the value v of the expression e.",
            category: Category::NumericalComputation,
            example_call: "calculate(2 + 3 * 4)",
            example_output: "14",
            min_args: 1,
            max_args: 1,
        },
        InterfaceDescriptor {
            name: "substitute",
            args_sig: "expression: str, conditions: str...",
            output_sig: "new expression: str",
            description: "Substitute the contextual conditions {c} into the expression e.",
            category: Category::NumericalComputation,
            example_call: "substitute(ax + 2bx = 3, x=1)",
            example_output: "a + 2b = 3",
            min_args: 2,
            max_args: usize::MAX,
        },
        InterfaceDescriptor {
            name: "solve_eq",
            args_sig: "equation: str",
            output_sig: "solution set: str",
            description: "Solve the equation e to get the solution set.",
            category: Category::EquationSolving,
            example_call: "solve_eq(2k + 1 = 0)",
            example_output: "[k=-\\frac{1}{2}]",
            min_args: 1,
            max_args: 1,
        },
        InterfaceDescriptor {
            name: "solve_ineq",
            args_sig: "inequation: str",
            output_sig: "solution set: str",
            description: "Solve the inequation e to get the solution set.",
            category: Category::EquationSolving,
            example_call: "solve_ineq(2x - 4 > 0)",
            example_output: "[x>2]",
            min_args: 1,
            max_args: 1,
        },
        InterfaceDescriptor {
            name: "solve_multi_eq",
            args_sig: "equations: str...",
            output_sig: "solution set: str",
            description: "Solve the system of equations to get the solution set.",
            category: Category::EquationSolving,
            example_call: "solve_multi_eq(x + y = 3, x - y = 1)",
            example_output: "[x=2, y=1]",
            min_args: 1,
            max_args: usize::MAX,
        },
        InterfaceDescriptor {
            name: "solve_multi_ineq",
            args_sig: "inequations: str...",
            output_sig: "solution set: str",
            description: "Solve the system of inequations to get the solution set.",
            category: Category::EquationSolving,
            example_call: "solve_multi_ineq(x > 1, x < 3)",
            example_output: "[1<x<3]",
            min_args: 1,
            max_args: usize::MAX,
        },
        InterfaceDescriptor {
            name: "partial_solve",
            args_sig: "equation: str, unknown: str",
            output_sig: "solution set: str",
            description: "Solve the equation e assuming that u is an unknown to get the solution set.",
            category: Category::EquationSolving,
            example_call: "partial_solve(a + 2b = 3, a)",
            example_output: "[a=-2b + 3]",
            min_args: 2,
            max_args: 2,
        },
        InterfaceDescriptor {
            name: "expand",
            args_sig: "expression: str",
            output_sig: "new expression: str",
            description: "Expand the expression into a polynomial.",
            category: Category::ExpressionTransformation,
            example_call: "expand((x + 1)^2)",
            example_output: "x^2 + 2x + 1",
            min_args: 1,
            max_args: 1,
        },
        InterfaceDescriptor {
            name: "factor",
            args_sig: "expression: str",
            output_sig: "new expression: str",
            description: "Factorize e to get e'.",
            category: Category::ExpressionTransformation,
            example_call: "factor(x^2 + 2x + 1)",
            example_output: "(x + 1)^2",
            min_args: 1,
            max_args: 1,
        },
        InterfaceDescriptor {
            name: "collect",
            args_sig: "expression: str, symbol: str",
            output_sig: "new expression: str",
            description: "Collect e based on the symbol x.",
            category: Category::ExpressionTransformation,
            example_call: "collect(ay + 2by - a - 2b, y)",
            example_output: "(a + 2b)y - (a + 2b)",
            min_args: 2,
            max_args: 2,
        },
        InterfaceDescriptor {
            name: "complete_the_square",
            args_sig: "expression: str",
            output_sig: "new expression: str",
            description: "Complete the square of e to get e'.",
            category: Category::ExpressionTransformation,
            example_call: "complete_the_square(x^2 + 2x + 3)",
            example_output: "(x + 1)^2 + 2",
            min_args: 1,
            max_args: 1,
        },
        InterfaceDescriptor {
            name: "think",
            args_sig: "thought: str",
            output_sig: "conclusion: str",
            description: "Draw a conclusion l' based on the thought l.",
            category: Category::Thinking,
            example_call: "think(both terms of the left side contain (a+2b))",
            example_output: "the equation can be written as (a+2b)(y-1)=3",
            min_args: 1,
            max_args: usize::MAX,
        },
    ]
}

#[cfg(test)]
mod tests;
