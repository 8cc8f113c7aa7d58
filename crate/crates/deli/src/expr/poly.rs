//! Sparse multivariate polynomials over exact scalars, ordered by graded
//! lexicographic monomial order. This is the workhorse behind canonical
//! forms, the solvers, and factoring.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::bigint::BigInt;
use num::{BigRational, Integer, One, Signed, Zero};

use super::scalar::{Scalar, ScalarError};
use super::Symbol;

/// A monomial: symbols with positive exponents, sorted by symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mono(Vec<(Symbol, u32)>);

impl Mono {
    pub fn one() -> Mono {
        Mono(Vec::new())
    }

    pub fn var(symbol: Symbol, exp: u32) -> Mono {
        if exp == 0 {
            Mono::one()
        } else {
            Mono(vec![(symbol, exp)])
        }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Symbol, u32)>) -> Mono {
        let mut map: BTreeMap<Symbol, u32> = BTreeMap::new();
        for (s, e) in pairs {
            if e > 0 {
                *map.entry(s).or_insert(0) += e;
            }
        }
        Mono(map.into_iter().collect())
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent_of(&self, symbol: &Symbol) -> u32 {
        self.0
            .iter()
            .find(|(s, _)| s == symbol)
            .map_or(0, |(_, e)| *e)
    }

    pub fn pairs(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono::from_pairs(self.0.iter().chain(other.0.iter()).cloned())
    }

    /// Exact monomial division, if every exponent divides.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut result = Vec::new();
        let mut remaining: BTreeMap<&Symbol, u32> = BTreeMap::new();
        for (s, e) in &self.0 {
            remaining.insert(s, *e);
        }
        for (s, e) in &other.0 {
            let have = remaining.remove(s)?;
            if have < *e {
                return None;
            }
            if have > *e {
                result.push((s.clone(), have - e));
            }
        }
        for (s, e) in remaining {
            result.push((s.clone(), e));
        }
        result.sort_by(|a, b| a.0.cmp(&b.0));
        Some(Mono(result))
    }

    /// Drop one symbol, returning its exponent and the rest.
    pub fn split(&self, symbol: &Symbol) -> (u32, Mono) {
        let exp = self.exponent_of(symbol);
        let rest = Mono(
            self.0
                .iter()
                .filter(|(s, _)| s != symbol)
                .cloned()
                .collect(),
        );
        (exp, rest)
    }

    fn sqrt(&self) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        for (s, e) in &self.0 {
            if e % 2 != 0 {
                return None;
            }
            out.push((s.clone(), e / 2));
        }
        Some(Mono(out))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Mono) -> Ordering {
        // Graded lex: total degree first, then the first symbol (in
        // lexicographic symbol order) with a differing exponent decides.
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let mut a = self.0.iter().peekable();
        let mut b = other.0.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return Ordering::Equal,
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    // Earlier symbol present only on one side: that side
                    // has the higher exponent there, so it is greater.
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        match ea.cmp(eb) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                        a.next();
                        b.next();
                    }
                },
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Mono) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Mono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (s, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial; no zero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Mono, Scalar>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn one() -> Poly {
        Poly::constant(Scalar::one())
    }

    pub fn constant(value: Scalar) -> Poly {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(Mono::one(), value);
        }
        Poly { terms }
    }

    pub fn from_rational(value: BigRational) -> Poly {
        Poly::constant(Scalar::from_rational(value))
    }

    pub fn from_int(value: i64) -> Poly {
        Poly::constant(Scalar::from_int(value))
    }

    pub fn symbol(symbol: Symbol) -> Poly {
        Poly::monomial(Mono::var(symbol, 1), Scalar::one())
    }

    pub fn monomial(mono: Mono, coeff: Scalar) -> Poly {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(mono, coeff);
        }
        Poly { terms }
    }

    pub fn from_terms(
        pairs: impl IntoIterator<Item = (Mono, Scalar)>,
    ) -> Result<Poly, ScalarError> {
        let mut out = Poly::zero();
        for (m, c) in pairs {
            out.add_term(m, c)?;
        }
        Ok(out)
    }

    fn add_term(&mut self, mono: Mono, coeff: Scalar) -> Result<(), ScalarError> {
        if coeff.is_zero() {
            return Ok(());
        }
        match self.terms.remove(&mono) {
            None => {
                self.terms.insert(mono, coeff);
            }
            Some(existing) => {
                let sum = existing.add(&coeff)?;
                if !sum.is_zero() {
                    self.terms.insert(mono, sum);
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().is_one())
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.terms.is_empty() {
            return Some(Scalar::zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// Coefficient of the unit monomial.
    pub fn constant_term(&self) -> Scalar {
        self.terms
            .get(&Mono::one())
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Terms in descending graded-lex order.
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Mono, &Scalar)> {
        self.terms.iter().rev()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Leading term under graded lex.
    pub fn leading(&self) -> Option<(&Mono, &Scalar)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Mono::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, symbol: &Symbol) -> u32 {
        self.terms
            .keys()
            .map(|m| m.exponent_of(symbol))
            .max()
            .unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        for m in self.terms.keys() {
            for (s, _) in m.pairs() {
                out.insert(s.clone());
            }
        }
        out
    }

    pub fn has_rational_coeffs(&self) -> bool {
        self.terms.values().all(Scalar::is_rational)
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.neg()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Poly) -> Result<Poly, ScalarError> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Poly) -> Result<Poly, ScalarError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Result<Poly, ScalarError> {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb)?)?;
            }
        }
        Ok(out)
    }

    pub fn mul_scalar(&self, value: &Scalar) -> Result<Poly, ScalarError> {
        if value.is_zero() {
            return Ok(Poly::zero());
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            terms.insert(m.clone(), c.mul(value)?);
        }
        Ok(Poly { terms })
    }

    pub fn div_scalar(&self, value: &Scalar) -> Result<Poly, ScalarError> {
        self.mul_scalar(&value.inverse()?)
    }

    pub fn pow(&self, exp: u32) -> Result<Poly, ScalarError> {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = exp;
        loop {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            e >>= 1;
            if e == 0 {
                return Ok(result);
            }
            base = base.mul(&base)?;
        }
    }

    /// Exact polynomial division; `None` when the remainder is nonzero.
    pub fn divide_exact(&self, divisor: &Poly) -> Result<Option<Poly>, ScalarError> {
        let Some((div_mono, div_coeff)) = divisor.leading() else {
            return Err(ScalarError::DivisionByZero);
        };
        let div_mono = div_mono.clone();
        let div_coeff = div_coeff.clone();
        let mut remainder = self.clone();
        let mut quotient = Poly::zero();
        while let Some((lead_mono, lead_coeff)) = remainder.leading() {
            let Some(q_mono) = lead_mono.div(&div_mono) else {
                return Ok(None);
            };
            let q_coeff = lead_coeff.div(&div_coeff)?;
            let q_term = Poly::monomial(q_mono, q_coeff);
            quotient = quotient.add(&q_term)?;
            remainder = remainder.sub(&q_term.mul(divisor)?)?;
        }
        Ok(Some(quotient))
    }

    /// Evaluate at an assignment covering every variable.
    pub fn eval(&self, assignment: &BTreeMap<Symbol, Scalar>) -> Result<Scalar, ScalarError> {
        let mut total = Scalar::zero();
        for (mono, coeff) in &self.terms {
            let mut term = coeff.clone();
            for (sym, exp) in mono.pairs() {
                let value = assignment
                    .get(sym)
                    .cloned()
                    .unwrap_or_else(Scalar::zero);
                let mut power = Scalar::one();
                for _ in 0..*exp {
                    power = power.mul(&value)?;
                }
                term = term.mul(&power)?;
            }
            total = total.add(&term)?;
        }
        Ok(total)
    }

    /// View as a univariate polynomial in `symbol`: index `d` holds the
    /// coefficient (free of `symbol`) of `symbol^d`.
    pub fn coeffs_in(&self, symbol: &Symbol) -> Vec<Poly> {
        let deg = self.degree_in(symbol) as usize;
        let mut out = vec![Poly::zero(); deg + 1];
        for (mono, coeff) in &self.terms {
            let (exp, rest) = mono.split(symbol);
            // add_term cannot fail here: distinct source monomials stay
            // distinct within one bucket only if they collide on `rest`,
            // which cannot happen because `exp` was unique per `rest`.
            out[exp as usize]
                .add_term(rest, coeff.clone())
                .expect("grouping preserves distinct monomials");
        }
        out
    }

    pub fn from_coeffs_in(symbol: &Symbol, coeffs: &[Poly]) -> Result<Poly, ScalarError> {
        let mut out = Poly::zero();
        for (d, c) in coeffs.iter().enumerate() {
            let v_pow = Poly::monomial(Mono::var(symbol.clone(), d as u32), Scalar::one());
            out = out.add(&c.mul(&v_pow)?)?;
        }
        Ok(out)
    }

    /// Positive rational content (gcd of all coefficients); requires
    /// rational coefficients. Zero polynomial has content zero.
    pub fn rational_content(&self) -> Option<BigRational> {
        if self.is_zero() {
            return Some(BigRational::zero());
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            let r = c.as_rational()?;
            num_gcd = num_gcd.gcd(r.numer());
            den_lcm = den_lcm.lcm(r.denom());
        }
        Some(BigRational::new(num_gcd, den_lcm))
    }

    /// Exact polynomial square root, when the polynomial is a perfect
    /// square with rational-square leading coefficient.
    pub fn sqrt_exact(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = self.constant_value() {
            let r = c.as_rational()?;
            return super::scalar::sqrt_exact(r).map(Poly::from_rational);
        }
        let (lead_mono, lead_coeff) = self.leading()?;
        let root_mono = lead_mono.sqrt()?;
        let root_coeff = super::scalar::sqrt_exact(lead_coeff.as_rational()?)?;
        let mut root = Poly::monomial(root_mono, Scalar::from_rational(root_coeff));
        let mut guard = 4 * self.terms.len() + 16;
        loop {
            let square = root.mul(&root).ok()?;
            let residue = self.sub(&square).ok()?;
            if residue.is_zero() {
                return Some(root);
            }
            guard = guard.checked_sub(1)?;
            let (res_mono, res_coeff) = residue.leading()?;
            let (r_mono, r_coeff) = root.leading()?;
            let next_mono = res_mono.div(r_mono)?;
            let two = Scalar::from_int(2);
            let next_coeff = res_coeff.div(&r_coeff.mul(&two).ok()?).ok()?;
            let next = Poly::monomial(next_mono, next_coeff);
            // Each added term must be strictly smaller, or we diverge.
            if next.leading()?.0 >= r_mono {
                return None;
            }
            root = root.add(&next).ok()?;
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms_desc().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*{m}")?;
            }
        }
        Ok(())
    }
}

/// GCD over rational-coefficient polynomials, normalized to be integer-
/// primitive with a positive leading coefficient. Polynomials with surd
/// coefficients get the trivial gcd 1.
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    if !a.has_rational_coeffs() || !b.has_rational_coeffs() {
        return Poly::one();
    }
    gcd_inner(a, b)
}

fn gcd_inner(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return normalize_primitive(b);
    }
    if b.is_zero() {
        return normalize_primitive(a);
    }
    if a.is_constant() || b.is_constant() {
        let ca = a.rational_content().expect("rational coefficients");
        let cb = b.rational_content().expect("rational coefficients");
        return Poly::from_rational(rational_gcd(&ca, &cb));
    }
    let var = a.vars().intersection(&b.vars()).last().cloned();
    let Some(var) = var else {
        // No shared variable: only the contents can divide both.
        let ca = a.rational_content().expect("rational coefficients");
        let cb = b.rational_content().expect("rational coefficients");
        return Poly::from_rational(rational_gcd(&ca, &cb));
    };

    let (cont_a, pp_a) = content_and_primitive(a, &var);
    let (cont_b, pp_b) = content_and_primitive(b, &var);
    let cont_gcd = gcd_inner(&cont_a, &cont_b);

    let mut p = pp_a;
    let mut q = pp_b;
    if p.degree_in(&var) < q.degree_in(&var) {
        std::mem::swap(&mut p, &mut q);
    }
    loop {
        if q.is_zero() {
            let g = normalize_primitive(&content_and_primitive(&p, &var).1);
            return cont_gcd.mul(&g).expect("rational arithmetic");
        }
        if q.degree_in(&var) == 0 {
            // A v-free divisor of a v-primitive polynomial is a unit
            // times a content divisor; only the contents remain.
            return cont_gcd;
        }
        let r = pseudo_rem(&p, &q, &var);
        p = q;
        q = content_and_primitive(&r, &var).1;
    }
}

/// Pseudo-remainder of `a` by `b` with respect to `var`.
fn pseudo_rem(a: &Poly, b: &Poly, var: &Symbol) -> Poly {
    let b_coeffs = b.coeffs_in(var);
    let b_deg = b_coeffs.len() - 1;
    let b_lead = b_coeffs[b_deg].clone();
    let mut r = a.clone();
    let mut guard = 2 * (a.degree_in(var) as usize + 2);
    while !r.is_zero() && r.degree_in(var) as usize >= b_deg && guard > 0 {
        guard -= 1;
        let r_coeffs = r.coeffs_in(var);
        let r_deg = r_coeffs.len() - 1;
        let r_lead = r_coeffs[r_deg].clone();
        let shift = Poly::monomial(Mono::var(var.clone(), (r_deg - b_deg) as u32), Scalar::one());
        // r := lc(b) * r - lc(r) * v^(dr-db) * b
        let left = r.mul(&b_lead).expect("rational arithmetic");
        let right = b
            .mul(&r_lead)
            .and_then(|p| p.mul(&shift))
            .expect("rational arithmetic");
        r = left.sub(&right).expect("rational arithmetic");
    }
    r
}

/// Split into (content, primitive part) with respect to `var`; the
/// content is the gcd of the `var`-coefficients.
fn content_and_primitive(p: &Poly, var: &Symbol) -> (Poly, Poly) {
    if p.is_zero() {
        return (Poly::zero(), Poly::zero());
    }
    let coeffs = p.coeffs_in(var);
    let mut content = Poly::zero();
    for c in &coeffs {
        if !c.is_zero() {
            content = gcd_inner(&content, c);
        }
    }
    let primitive = p
        .divide_exact(&content)
        .expect("rational arithmetic")
        .expect("content divides");
    (content, primitive)
}

/// Scale to integer-primitive form with positive leading coefficient.
fn normalize_primitive(p: &Poly) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let content = p.rational_content().expect("rational coefficients");
    let mut out = p
        .div_scalar(&Scalar::from_rational(content))
        .expect("nonzero content");
    if out.leading().map(|(_, c)| c.signum()) == Some(-1) {
        out = out.neg();
    }
    out
}

pub fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    BigRational::new(
        a.numer().gcd(b.numer()),
        a.denom().lcm(b.denom()),
    )
    .abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(name: &str) -> Symbol {
        Symbol::new(name)
    }

    fn x_poly() -> Poly {
        Poly::symbol(sym("x"))
    }

    #[test]
    fn graded_lex_ordering() {
        let x = Mono::var(sym("x"), 1);
        let y = Mono::var(sym("y"), 1);
        let x2 = Mono::var(sym("x"), 2);
        let xy = Mono::from_pairs([(sym("x"), 1), (sym("y"), 1)]);
        assert!(x2 > xy);
        assert!(xy > Mono::var(sym("y"), 2));
        assert!(x > y);
        assert!(x2 > x);
    }

    #[test]
    fn expand_binomial_square() {
        let p = x_poly().add(&Poly::one()).unwrap();
        let sq = p.pow(2).unwrap();
        let expected = Poly::from_terms([
            (Mono::var(sym("x"), 2), Scalar::one()),
            (Mono::var(sym("x"), 1), Scalar::from_int(2)),
            (Mono::one(), Scalar::one()),
        ])
        .unwrap();
        assert_eq!(sq, expected);
    }

    #[test]
    fn exact_division_roundtrip() {
        let x = x_poly();
        let a = x.add(&Poly::from_int(2)).unwrap();
        let b = x.sub(&Poly::from_int(3)).unwrap();
        let prod = a.mul(&b).unwrap();
        assert_eq!(prod.divide_exact(&a).unwrap(), Some(b.clone()));
        assert_eq!(prod.divide_exact(&b).unwrap(), Some(a.clone()));
        let off = prod.add(&Poly::one()).unwrap();
        assert_eq!(off.divide_exact(&a).unwrap(), None);
    }

    #[test]
    fn multivariate_gcd_extracts_shared_factor() {
        // gcd(a*y + 2*b*y, a + 2*b) over variables {a, b, y}
        let a = Poly::symbol(sym("a"));
        let b = Poly::symbol(sym("b"));
        let y = Poly::symbol(sym("y"));
        let shared = a.add(&b.mul_scalar(&Scalar::from_int(2)).unwrap()).unwrap();
        let lhs = shared.mul(&y).unwrap();
        let g = poly_gcd(&lhs, &shared);
        assert_eq!(g, shared);
    }

    #[test]
    fn univariate_gcd() {
        // gcd(x^2 - 1, x^2 - 2x + 1) = x - 1
        let x = x_poly();
        let p = x.pow(2).unwrap().sub(&Poly::one()).unwrap();
        let q = x.sub(&Poly::one()).unwrap().pow(2).unwrap();
        let g = poly_gcd(&p, &q);
        assert_eq!(g, x.sub(&Poly::one()).unwrap());
    }

    #[test]
    fn sqrt_of_perfect_square() {
        let x = x_poly();
        let y = Poly::symbol(sym("y"));
        let base = x
            .add(&y.mul_scalar(&Scalar::from_int(3)).unwrap())
            .unwrap()
            .add(&Poly::from_int(1))
            .unwrap();
        let square = base.pow(2).unwrap();
        assert_eq!(square.sqrt_exact(), Some(base));
        let not_square = square.add(&Poly::one()).unwrap();
        assert_eq!(not_square.sqrt_exact(), None);
    }

    #[test]
    fn eval_exact() {
        // p = x^2 y - 1/2 at x = 3/2, y = 2 -> 4
        let p = Poly::from_terms([
            (
                Mono::from_pairs([(sym("x"), 2), (sym("y"), 1)]),
                Scalar::one(),
            ),
            (Mono::one(), Scalar::from_ratio(-1, 2)),
        ])
        .unwrap();
        let mut assign = BTreeMap::new();
        assign.insert(sym("x"), Scalar::from_ratio(3, 2));
        assign.insert(sym("y"), Scalar::from_int(2));
        assert_eq!(p.eval(&assign).unwrap(), Scalar::from_ratio(4, 1));
    }
}
