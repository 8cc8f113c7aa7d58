use std::sync::Arc;

use proptest::prelude::*;

use crate::expr::{is_equiv, parse, Expr};
use crate::gateway::{Cassette, CassetteBackend, ChatRequest, Gateway, Message};

use super::*;

fn registry() -> Registry {
    Registry::standalone()
}

fn run(registry: &Registry, name: &str, args: &[&str]) -> InvocationResult {
    let action = Action::call(name, args.iter().map(|s| s.to_string()).collect());
    registry.invoke(&action)
}

fn ok_expr(registry: &Registry, name: &str, args: &[&str]) -> Expr {
    match run(registry, name, args) {
        InvocationResult::Ok(InvokeOutput::Expr(e)) => e,
        other => panic!("{name}({args:?}) did not return an expression: {other:?}"),
    }
}

fn err_code(registry: &Registry, name: &str, args: &[&str]) -> String {
    match run(registry, name, args) {
        InvocationResult::Error { code, .. } => code,
        other => panic!("{name}({args:?}) unexpectedly succeeded: {other:?}"),
    }
}

fn assert_equiv(actual: &Expr, expected: &str) {
    let expected = parse(expected).unwrap();
    assert!(
        is_equiv(actual, &expected).unwrap_or(false),
        "expected `{expected}`, got `{actual}`"
    );
}

#[test]
fn calculate_examples() {
    let r = registry();
    assert_eq!(ok_expr(&r, "calculate", &["2+3*4"]).to_string(), "14");
    // Exact rational arithmetic oracle: 1/2 + 1/3 = 5/6.
    let expected = num::BigRational::new(1.into(), 2.into())
        + num::BigRational::new(1.into(), 3.into());
    assert_eq!(
        ok_expr(&r, "calculate", &["1/2 + 1/3"]).to_string(),
        format!("\\frac{{{}}}{{{}}}", expected.numer(), expected.denom())
    );
    assert_eq!(err_code(&r, "calculate", &["x+1"]), "NonNumeric");
    // Surd values stay exact.
    assert_eq!(ok_expr(&r, "calculate", &["\\sqrt{8}"]).to_string(), "2\\sqrt{2}");
}

#[test]
fn substitute_examples() {
    let r = registry();
    let e = ok_expr(&r, "substitute", &["ax+2bx=3", "x=1"]);
    assert_eq!(e.to_string(), "a + 2b = 3");
    assert_eq!(ok_expr(&r, "substitute", &["x^2", "x=3"]).to_string(), "9");
    // Expansion-based simplification oracle: x + y with y = x expands to 2x.
    let simplified = ok_expr(&r, "substitute", &["x+y", "y=x"]);
    assert_eq!(simplified.to_string(), "2x");
    assert_equiv(&simplified, "2x");
    assert_eq!(err_code(&r, "substitute", &["x+y", "x+y=3"]), "BadCondition");
    assert_eq!(err_code(&r, "substitute", &["x", "x=1", "x=2"]), "BadCondition");
    // Simultaneous, not sequential: {x=y, y=3} touches the original x only.
    assert_eq!(
        ok_expr(&r, "substitute", &["x+y", "x=y", "y=3"]).to_string(),
        "y + 3"
    );
}

#[test]
fn solve_eq_examples() {
    let r = registry();
    assert_eq!(
        ok_expr(&r, "solve_eq", &["2k+1=0"]).to_string(),
        "[k=-\\frac{1}{2}]"
    );
    assert_eq!(ok_expr(&r, "solve_eq", &["3y-3=3"]).to_string(), "[y=2]");
    assert_eq!(
        ok_expr(&r, "solve_eq", &["x^2-1=0"]).to_string(),
        "[x=-1, x=1]"
    );
    assert_eq!(err_code(&r, "solve_eq", &["x+y=1"]), "NotUnivariate");
    // Irrational roots in exact a+b*sqrt(d) form.
    assert_eq!(
        ok_expr(&r, "solve_eq", &["x^2-2x-1=0"]).to_string(),
        "[x=1 - \\sqrt{2}, x=1 + \\sqrt{2}]"
    );
    // No real roots.
    assert_eq!(ok_expr(&r, "solve_eq", &["x^2+1=0"]).to_string(), "[]");
    // Factorable cubic.
    assert_eq!(
        ok_expr(&r, "solve_eq", &["x^3-x=0"]).to_string(),
        "[x=-1, x=0, x=1]"
    );
    // A root that zeroes a denominator is extraneous.
    assert_eq!(
        ok_expr(&r, "solve_eq", &["\\frac{x^2-1}{x-1}=0"]).to_string(),
        "[x=-1]"
    );
}

#[test]
fn solve_ineq_examples() {
    let r = registry();
    assert_eq!(ok_expr(&r, "solve_ineq", &["2x-4>0"]).to_string(), "[x>2]");
    assert_eq!(ok_expr(&r, "solve_ineq", &["-3x>=6"]).to_string(), "[x<=-2]");
    assert_eq!(ok_expr(&r, "solve_ineq", &["x^2<0"]).to_string(), "[]");
    assert_eq!(ok_expr(&r, "solve_ineq", &["x^2<=0"]).to_string(), "[x=0]");
    assert_eq!(ok_expr(&r, "solve_ineq", &["x^2>=0"]).to_string(), "[x \\in R]");
    assert_eq!(
        ok_expr(&r, "solve_ineq", &["x^2-3x+2<0"]).to_string(),
        "[1<x<2]"
    );
    assert_eq!(
        ok_expr(&r, "solve_ineq", &["x^2>1"]).to_string(),
        "[x<-1, x>1]"
    );
}

#[test]
fn solve_multi_eq_examples() {
    let r = registry();
    assert_eq!(
        ok_expr(&r, "solve_multi_eq", &["x+y=3", "x-y=1"]).to_string(),
        "[x=2, y=1]"
    );
    assert_eq!(
        ok_expr(&r, "solve_multi_eq", &["a+2b=3", "a-b=0"]).to_string(),
        "[a=1, b=1]"
    );
    assert_eq!(
        err_code(&r, "solve_multi_eq", &["x+y=1", "x+y=2"]),
        "Inconsistent"
    );
    assert_eq!(
        err_code(&r, "solve_multi_eq", &["xy=1", "x+y=2"]),
        "NonLinearSystem"
    );
    // Underdetermined: pivots in terms of free symbols.
    assert_eq!(
        ok_expr(&r, "solve_multi_eq", &["x+y=1"]).to_string(),
        "[x=-y + 1]"
    );
}

#[test]
fn solve_multi_ineq_examples() {
    let r = registry();
    assert_eq!(
        ok_expr(&r, "solve_multi_ineq", &["x>1", "x<3"]).to_string(),
        "[1<x<3]"
    );
    assert_eq!(
        ok_expr(&r, "solve_multi_ineq", &["x>2", "x<1"]).to_string(),
        "[]"
    );
    assert_eq!(
        ok_expr(&r, "solve_multi_ineq", &["x>=0", "2x<=4"]).to_string(),
        "[0<=x<=2]"
    );
    assert_eq!(
        err_code(&r, "solve_multi_ineq", &["x>1", "y<3"]),
        "NotUnivariate"
    );
}

#[test]
fn partial_solve_examples() {
    let r = registry();
    let linear = ok_expr(&r, "partial_solve", &["a+2b=3", "a"]);
    assert_equiv(&linear, "[a=3-2b]");
    let ratio = ok_expr(&r, "partial_solve", &["xy=6", "y"]);
    assert_equiv(&ratio, "[y=\\frac{6}{x}]");
    // Back-substitution oracle for the fraction case.
    let e = ok_expr(&r, "partial_solve", &["(a+2b)y-(a+2b)=3", "y"]);
    assert_equiv(&e, "[y=\\frac{3}{a+2b}+1]");
    assert_eq!(err_code(&r, "partial_solve", &["a+2b=3", "c"]), "SymbolAbsent");
    // Quadratic in the unknown with a perfect-square discriminant.
    let q = ok_expr(&r, "partial_solve", &["y^2 - 2ky + k^2 = 0", "y"]);
    assert_equiv(&q, "[y=k]");
}

#[test]
fn expand_examples() {
    let r = registry();
    assert_eq!(ok_expr(&r, "expand", &["(x+1)^2"]).to_string(), "x^2 + 2x + 1");
    assert_eq!(ok_expr(&r, "expand", &["(x+y)(x-y)"]).to_string(), "x^2 - y^2");
    assert_eq!(ok_expr(&r, "expand", &["3(y-1)"]).to_string(), "3y - 3");
    assert_eq!(err_code(&r, "expand", &["\\sqrt{x}"]), "NonRationalForm");
}

#[test]
fn factor_examples() {
    let r = registry();
    assert_eq!(ok_expr(&r, "factor", &["x^2+2x+1"]).to_string(), "(x + 1)^2");
    assert_eq!(
        ok_expr(&r, "factor", &["x^2-4"]).to_string(),
        "(x - 2)(x + 2)"
    );
    // Discriminant oracle: b^2 - 4ac = 1 - 4 < 0, irreducible over Q.
    assert_eq!(ok_expr(&r, "factor", &["x^2+x+1"]).to_string(), "x^2 + x + 1");
    // The Table-style multivariate case.
    assert_eq!(
        ok_expr(&r, "factor", &["ay+2by-a-2b"]).to_string(),
        "(a + 2b)(y - 1)"
    );
}

#[test]
fn collect_examples() {
    let r = registry();
    assert_eq!(
        ok_expr(&r, "collect", &["ay+2by-a-2b", "y"]).to_string(),
        "(a + 2b)y - (a + 2b)"
    );
    assert_eq!(
        ok_expr(&r, "collect", &["x^2+2x+x", "x"]).to_string(),
        "x^2 + 3x"
    );
    assert_eq!(
        ok_expr(&r, "collect", &["ax+bx+c", "x"]).to_string(),
        "(a + b)x + c"
    );
    // Per-side collection on an equation.
    assert_eq!(
        ok_expr(&r, "collect", &["a(y-1)+2b(y-1)=3", "y"]).to_string(),
        "(a + 2b)y - (a + 2b) = 3"
    );
}

#[test]
fn complete_the_square_examples() {
    let r = registry();
    for (input, expected) in [
        ("x^2+2x+3", "(x + 1)^2 + 2"),
        ("x^2-6x", "(x - 3)^2 - 9"),
        ("2x^2+4x", "2(x + 1)^2 - 2"),
    ] {
        let result = ok_expr(&r, "complete_the_square", &[input]);
        assert_eq!(result.to_string(), expected);
        // Expand-back oracle.
        let expanded = ok_expr(&r, "expand", &[&result.to_string()]);
        let original = ok_expr(&r, "expand", &[input]);
        assert_eq!(expanded, original, "expand-back mismatch for {input}");
    }
    assert_eq!(err_code(&r, "complete_the_square", &["x^3+1"]), "NotQuadratic");
    assert_eq!(err_code(&r, "complete_the_square", &["x+1"]), "NotQuadratic");
}

#[test]
fn think_routes_through_gateway() {
    let thought = "both terms of the left side contain (a+2b)";
    let conclusion = "the equation can be written as (a+2b)(y-1)=3";
    let mut cassette = Cassette::new();
    cassette.record_exchange(
        &ChatRequest::new("scripted", vec![Message::user(thought)]),
        conclusion,
    );
    let gateway = Arc::new(Gateway::new(Box::new(CassetteBackend::replay(cassette))));
    let r = Registry::with_gateway(gateway, "scripted");
    let result = run(&r, "think", &[thought]);
    assert_eq!(result, InvocationResult::ok_text(conclusion));
    // Unscripted requests surface as gateway errors in the result.
    match run(&r, "think", &["something else entirely"]) {
        InvocationResult::Error { code, .. } => assert_eq!(code, "GatewayError"),
        other => panic!("expected gateway error, got {other:?}"),
    }
    // A standalone registry has no model to think with.
    assert_eq!(err_code(&registry(), "think", &["ponder"]), "GatewayError");
}

#[test]
fn invoke_dispatch_and_errors() {
    let r = registry();
    let ok = r.invoke(&Action::call("solve_eq", vec!["2k+1=0".into()]));
    assert_eq!(ok.render(), "[k=-\\frac{1}{2}]");

    let not_univariate = r.invoke(&Action::call("solve_eq", vec!["x+y=1".into()]));
    let InvocationResult::Error { code, message } = &not_univariate else {
        panic!("expected error");
    };
    assert_eq!(code, "NotUnivariate");
    assert!(message.contains("x, y"), "message should name the symbols: {message}");
    assert!(message.contains("partial_solve"), "message should hint: {message}");

    let unknown = r.invoke(&Action::call("frobnicate", vec!["x".into()]));
    let InvocationResult::Error { code, .. } = &unknown else {
        panic!("expected error");
    };
    assert_eq!(code, "UnknownInterface");

    let arity = r.invoke(&Action::call("collect", vec!["x".into()]));
    let InvocationResult::Error { code, .. } = &arity else {
        panic!("expected error");
    };
    assert_eq!(code, "ArityMismatch");

    let malformed = r.invoke(&Action::malformed("no action found", (0, 4)));
    assert!(!malformed.is_ok());

    let bad_parse = r.invoke(&Action::call("expand", vec!["x +* 2".into()]));
    let InvocationResult::Error { code, .. } = &bad_parse else {
        panic!("expected error");
    };
    assert_eq!(code, "SyntaxError");
}

#[test]
fn descriptor_docstrings_render_in_prompt_convention() {
    let r = registry();
    assert_eq!(r.descriptors().len(), 12);
    let expand = r.descriptor("expand").unwrap();
    assert_eq!(
        expand.docstring(),
        "expand(expression: str) -> new expression: str: Expand the expression into a polynomial. e.g. expand((x + 1)^2) -> x^2 + 2x + 1"
    );
    let docs = r.render_docs();
    assert_eq!(docs.lines().count(), 12);
    for d in r.descriptors() {
        assert!(docs.contains(d.name));
    }
}

#[test]
fn every_descriptor_example_executes() {
    // think needs its scripted exchange; the rest are pure.
    let think = registry().descriptor("think").cloned().unwrap();
    let mut cassette = Cassette::new();
    let inner = think
        .example_call
        .trim_start_matches("think(")
        .trim_end_matches(')');
    cassette.record_exchange(
        &ChatRequest::new("scripted", vec![Message::user(inner)]),
        think.example_output,
    );
    let gateway = Arc::new(Gateway::new(Box::new(CassetteBackend::replay(cassette))));
    let r = Registry::with_gateway(gateway, "scripted");

    for descriptor in r.descriptors() {
        let call = descriptor.example_call;
        let open = call.find('(').unwrap();
        let name = &call[..open];
        let inner = &call[open + 1..call.len() - 1];
        let args = split_example_args(inner);
        let action = Action::call(name, args);
        let result = r.invoke(&action);
        assert_eq!(
            result.render(),
            descriptor.example_output,
            "descriptor example failed for {name}"
        );
    }
}

fn split_example_args(inner: &str) -> Vec<String> {
    let mut depth = 0usize;
    let mut current = String::new();
    let mut out = Vec::new();
    for c in inner.chars() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                out.push(current.trim().to_string());
                current.clear();
                continue;
            }
            _ => {}
        }
        current.push(c);
    }
    if !current.trim().is_empty() {
        out.push(current.trim().to_string());
    }
    out
}

#[test]
fn roots_back_substitute_to_exact_zero() {
    let r = registry();
    for eq in ["x^2-5x+6=0", "2x^2+3x-2=0", "x^2-2=0", "x^2+x-1=0"] {
        let set = ok_expr(&r, "solve_eq", &[eq]);
        let items = set.solution_items().unwrap();
        assert!(!items.is_empty(), "expected roots for {eq}");
        for item in items {
            let crate::expr::SolutionItem::Binding { value, .. } = item else {
                panic!("expected bindings");
            };
            let root_text = Expr::from_node(value.clone()).to_string();
            let substituted = ok_expr(&r, "substitute", &[eq, &format!("x={root_text}")]);
            let cf = crate::expr::canonicalize(&substituted).unwrap();
            assert!(cf.is_zero(), "{eq} at {root_text} -> {substituted}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // invoke is total: arbitrary action names and argument strings never
    // panic, they produce ok or a structured error.
    #[test]
    fn invoke_is_total(name in "[a-z_]{0,18}", args in prop::collection::vec(".{0,24}", 0..4)) {
        let r = registry();
        let action = Action::call(name, args);
        let _ = r.invoke(&action);
    }

    // expand(factor(expand(p))) == expand(p) on random polynomials.
    #[test]
    fn factor_expand_roundtrip(seed in 0u64..500) {
        let r = registry();
        let text = random_poly_text(seed);
        let expanded = ok_expr(&r, "expand", &[&text]);
        let factored = ok_expr(&r, "factor", &[&expanded.to_string()]);
        let back = ok_expr(&r, "expand", &[&factored.to_string()]);
        prop_assert_eq!(&back, &expanded, "factor broke {} (factored {})", text, factored);
    }

    // collect preserves equivalence.
    #[test]
    fn collect_preserves_equivalence(seed in 0u64..200) {
        let r = registry();
        let text = random_poly_text(seed);
        let collected = ok_expr(&r, "collect", &[&text, "x"]);
        let original = parse(&text).unwrap();
        prop_assert!(is_equiv(&collected, &original).unwrap());
    }
}

/// Deterministic random polynomial source text in up to three symbols.
pub(crate) fn random_poly_text(seed: u64) -> String {
    use rand::Rng as _;
    use rand::SeedableRng as _;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let symbols = ["x", "y", "z"];
    let n_factors = rng.random_range(1..=3);
    let mut factors = Vec::new();
    for _ in 0..n_factors {
        let n_terms = rng.random_range(1..=3);
        let mut terms = Vec::new();
        for _ in 0..n_terms {
            let coeff: i64 = rng.random_range(-9..=9);
            let var = symbols[rng.random_range(0..symbols.len())];
            let exp = rng.random_range(0..=2);
            let term = match exp {
                0 => format!("{coeff}"),
                1 => format!("{coeff}{var}"),
                _ => format!("{coeff}{var}^{exp}"),
            };
            terms.push(term);
        }
        factors.push(format!("({})", terms.join(" + ")));
    }
    factors.join("")
}
