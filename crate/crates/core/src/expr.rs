//! Expression trees mixing polynomials and exponentials, and the shared text
//! grammar: `x1^2 + (3/2)*i*x2*x3 - exp(x1) / 2`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{Monomial, Poly};
use crate::scalar::GaussianRational;

/// Ordered variable names; index `i` is the `i`-th coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarNames(Vec<String>);

impl VarNames {
    pub fn new(names: Vec<String>) -> Self {
        VarNames(names)
    }

    /// `x1, …, xn`
    pub fn indexed(n: usize) -> Self {
        VarNames((1..=n).map(|i| format!("x{i}")).collect())
    }

    /// Infers variables from identifiers in `texts`: when every identifier is
    /// `x<k>` the result is `x1..x<max k>`, otherwise the identifiers sorted
    /// alphabetically.
    pub fn infer<'a>(texts: impl IntoIterator<Item = &'a str>) -> Self {
        let mut idents: Vec<String> = Vec::new();
        for t in texts {
            let mut chars = t.char_indices().peekable();
            while let Some((start, c)) = chars.next() {
                if c.is_ascii_alphabetic() || c == '_' {
                    let mut end = start + c.len_utf8();
                    while let Some(&(i, d)) = chars.peek() {
                        if d.is_ascii_alphanumeric() || d == '_' {
                            end = i + d.len_utf8();
                            chars.next();
                        } else {
                            break;
                        }
                    }
                    let id = &t[start..end];
                    if id != "i" && id != "exp" && !idents.iter().any(|s| s == id) {
                        idents.push(id.to_string());
                    }
                }
            }
        }
        let indexed: Option<Vec<usize>> = idents
            .iter()
            .map(|s| s.strip_prefix('x').and_then(|r| r.parse::<usize>().ok()).filter(|&k| k >= 1))
            .collect();
        match indexed {
            Some(ks) => VarNames::indexed(ks.into_iter().max().unwrap_or(0)),
            None => {
                idents.sort();
                VarNames(idents)
            }
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|s| s == name)
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("{message} at line {line}, column {column}")]
pub struct ParseError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl ParseError {
    fn at(text: &str, offset: usize, message: impl Into<String>) -> Self {
        let before = &text[..offset.min(text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rfind('\n').map_or(before.len(), |p| before.len() - p - 1) + 1;
        ParseError { message: message.into(), line, column }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Const {
    Exact(GaussianRational),
    Float(Complex64),
}

impl Const {
    pub fn to_c64(&self) -> Complex64 {
        match self {
            Const::Exact(g) => g.to_complex64(),
            Const::Float(z) => *z,
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Const::Exact(g) => g.is_zero(),
            Const::Float(z) => z.is_zero(),
        }
    }

    fn is_one(&self) -> bool {
        match self {
            Const::Exact(g) => g.is_one(),
            Const::Float(z) => *z == Complex64::new(1.0, 0.0),
        }
    }

    fn add(&self, other: &Const) -> Const {
        match (self, other) {
            (Const::Exact(a), Const::Exact(b)) => Const::Exact(a + b),
            _ => Const::Float(self.to_c64() + other.to_c64()),
        }
    }

    fn mul(&self, other: &Const) -> Const {
        match (self, other) {
            (Const::Exact(a), Const::Exact(b)) => Const::Exact(a * b),
            _ => Const::Float(self.to_c64() * other.to_c64()),
        }
    }

    fn pow(&self, e: u32) -> Const {
        match self {
            Const::Exact(a) => Const::Exact(a.pow(e)),
            Const::Float(z) => Const::Float(z.powu(e)),
        }
    }
}

/// Finite expression tree of an entire function of several complex variables.
#[derive(Clone, Debug, PartialEq)]
pub enum ExpPoly {
    Const(Const),
    Var(usize),
    Sum(Vec<ExpPoly>),
    Product(Vec<ExpPoly>),
    Pow(Box<ExpPoly>, u32),
    Exp(Box<ExpPoly>),
}

impl ExpPoly {
    pub fn int(n: i64) -> Self {
        ExpPoly::Const(Const::Exact(GaussianRational::from_int(n)))
    }

    pub fn exact(c: GaussianRational) -> Self {
        ExpPoly::Const(Const::Exact(c))
    }

    pub fn zero() -> Self {
        ExpPoly::int(0)
    }

    pub fn var(i: usize) -> Self {
        ExpPoly::Var(i)
    }

    pub fn exp(e: ExpPoly) -> Self {
        ExpPoly::Exp(Box::new(e))
    }

    pub fn pow(e: ExpPoly, k: u32) -> Self {
        ExpPoly::Pow(Box::new(e), k)
    }

    pub fn add(a: ExpPoly, b: ExpPoly) -> Self {
        ExpPoly::Sum(vec![a, b]).simplify()
    }

    pub fn sub(a: ExpPoly, b: ExpPoly) -> Self {
        ExpPoly::Sum(vec![a, ExpPoly::neg(b)]).simplify()
    }

    pub fn mul(a: ExpPoly, b: ExpPoly) -> Self {
        ExpPoly::Product(vec![a, b]).simplify()
    }

    pub fn neg(a: ExpPoly) -> Self {
        ExpPoly::Product(vec![ExpPoly::int(-1), a]).simplify()
    }

    pub fn from_poly(p: &Poly) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let mut factors = vec![ExpPoly::exact(c.clone())];
                for (i, &e) in m.exps().iter().enumerate() {
                    if e > 0 {
                        factors.push(ExpPoly::pow(ExpPoly::Var(i), e));
                    }
                }
                ExpPoly::Product(factors)
            })
            .collect();
        ExpPoly::Sum(terms).simplify()
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            ExpPoly::Const(_) => None,
            ExpPoly::Var(i) => Some(*i),
            ExpPoly::Sum(v) | ExpPoly::Product(v) => v.iter().filter_map(ExpPoly::max_var).max(),
            ExpPoly::Pow(e, _) | ExpPoly::Exp(e) => e.max_var(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExpPoly::Const(c) if c.is_zero())
    }

    pub fn constant_value(&self) -> Option<&Const> {
        match self {
            ExpPoly::Const(c) => Some(c),
            _ => None,
        }
    }

    pub fn contains_exp(&self) -> bool {
        match self {
            ExpPoly::Const(_) | ExpPoly::Var(_) => false,
            ExpPoly::Sum(v) | ExpPoly::Product(v) => v.iter().any(ExpPoly::contains_exp),
            ExpPoly::Pow(e, _) => e.contains_exp(),
            ExpPoly::Exp(_) => true,
        }
    }

    /// Flattens nested sums/products, folds constants and prunes zeros and ones.
    pub fn simplify(&self) -> ExpPoly {
        match self {
            ExpPoly::Const(_) | ExpPoly::Var(_) => self.clone(),
            ExpPoly::Sum(items) => {
                let mut acc = Const::Exact(GaussianRational::zero());
                let mut rest = Vec::new();
                for it in items {
                    match it.simplify() {
                        ExpPoly::Const(c) => acc = acc.add(&c),
                        ExpPoly::Sum(inner) => rest.extend(inner),
                        other => rest.push(other),
                    }
                }
                if !acc.is_zero() {
                    rest.push(ExpPoly::Const(acc));
                }
                match rest.len() {
                    0 => ExpPoly::zero(),
                    1 => rest.pop().expect("one element"),
                    _ => ExpPoly::Sum(rest),
                }
            }
            ExpPoly::Product(items) => {
                let mut acc = Const::Exact(GaussianRational::one());
                let mut rest = Vec::new();
                for it in items {
                    match it.simplify() {
                        ExpPoly::Const(c) => acc = acc.mul(&c),
                        ExpPoly::Product(inner) => {
                            for f in inner {
                                match f {
                                    ExpPoly::Const(c) => acc = acc.mul(&c),
                                    other => rest.push(other),
                                }
                            }
                        }
                        other => rest.push(other),
                    }
                }
                if acc.is_zero() {
                    return ExpPoly::Const(acc);
                }
                if !acc.is_one() || rest.is_empty() {
                    rest.insert(0, ExpPoly::Const(acc));
                }
                match rest.len() {
                    1 => rest.pop().expect("one element"),
                    _ => ExpPoly::Product(rest),
                }
            }
            ExpPoly::Pow(base, k) => {
                let b = base.simplify();
                match (k, b) {
                    (0, _) => ExpPoly::int(1),
                    (1, b) => b,
                    (k, ExpPoly::Const(c)) => ExpPoly::Const(c.pow(*k)),
                    (k, ExpPoly::Pow(inner, j)) => ExpPoly::Pow(inner, j * k),
                    (k, b) => ExpPoly::Pow(Box::new(b), *k),
                }
            }
            ExpPoly::Exp(arg) => {
                let a = arg.simplify();
                match &a {
                    ExpPoly::Const(c) if c.is_zero() => ExpPoly::int(1),
                    ExpPoly::Const(Const::Float(z)) => ExpPoly::Const(Const::Float(z.exp())),
                    _ => ExpPoly::Exp(Box::new(a)),
                }
            }
        }
    }

    /// Symbolic partial derivative with respect to variable `var`, simplified.
    pub fn derivative(&self, var: usize) -> ExpPoly {
        let d = match self {
            ExpPoly::Const(_) => ExpPoly::zero(),
            ExpPoly::Var(i) => ExpPoly::int(if *i == var { 1 } else { 0 }),
            ExpPoly::Sum(items) => ExpPoly::Sum(items.iter().map(|e| e.derivative(var)).collect()),
            ExpPoly::Product(items) => {
                let mut terms = Vec::new();
                for k in 0..items.len() {
                    let dk = items[k].derivative(var);
                    if dk.is_zero() {
                        continue;
                    }
                    let mut factors: Vec<ExpPoly> = Vec::with_capacity(items.len());
                    for (j, it) in items.iter().enumerate() {
                        factors.push(if j == k { dk.clone() } else { it.clone() });
                    }
                    terms.push(ExpPoly::Product(factors));
                }
                ExpPoly::Sum(terms)
            }
            ExpPoly::Pow(base, k) => {
                if *k == 0 {
                    ExpPoly::zero()
                } else {
                    ExpPoly::Product(vec![
                        ExpPoly::int(*k as i64),
                        ExpPoly::Pow(base.clone(), k - 1),
                        base.derivative(var),
                    ])
                }
            }
            ExpPoly::Exp(arg) => ExpPoly::Product(vec![arg.derivative(var), self.clone()]),
        };
        d.simplify()
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        match self {
            ExpPoly::Const(c) => c.to_c64(),
            ExpPoly::Var(i) => x[*i],
            ExpPoly::Sum(items) => items.iter().map(|e| e.eval(x)).sum(),
            ExpPoly::Product(items) => items.iter().map(|e| e.eval(x)).product(),
            ExpPoly::Pow(b, k) => b.eval(x).powu(*k),
            ExpPoly::Exp(a) => a.eval(x).exp(),
        }
    }

    /// Exact polynomial in `nvars` variables; `None` when an exponential or a
    /// floating constant is present.
    pub fn to_poly(&self, nvars: usize) -> Option<Poly> {
        Some(match self {
            ExpPoly::Const(Const::Exact(c)) => Poly::constant(nvars, c.clone()),
            ExpPoly::Const(Const::Float(_)) => return None,
            ExpPoly::Var(i) => {
                if *i >= nvars {
                    return None;
                }
                Poly::monomial(Monomial::var(nvars, *i, 1), GaussianRational::one())
            }
            ExpPoly::Sum(items) => {
                let mut acc = Poly::zero(nvars);
                for it in items {
                    acc = &acc + &it.to_poly(nvars)?;
                }
                acc
            }
            ExpPoly::Product(items) => {
                let mut acc = Poly::one(nvars);
                for it in items {
                    acc = &acc * &it.to_poly(nvars)?;
                }
                acc
            }
            ExpPoly::Pow(b, k) => b.to_poly(nvars)?.pow(*k),
            ExpPoly::Exp(_) => return None,
        })
    }

    pub fn fmt_with(&self, names: &VarNames) -> String {
        match self {
            ExpPoly::Const(Const::Exact(c)) => c.to_string(),
            ExpPoly::Const(Const::Float(z)) => {
                if z.im == 0.0 {
                    format!("{}", z.re)
                } else {
                    format!("({} + {}*i)", z.re, z.im)
                }
            }
            ExpPoly::Var(i) => names.name(*i).to_string(),
            ExpPoly::Sum(items) => {
                let parts: Vec<String> = items.iter().map(|e| e.fmt_with(names)).collect();
                format!("({})", parts.join(" + "))
            }
            ExpPoly::Product(items) => {
                let parts: Vec<String> = items.iter().map(|e| e.fmt_with(names)).collect();
                parts.join("*")
            }
            ExpPoly::Pow(b, k) => match **b {
                ExpPoly::Var(_) => format!("{}^{}", b.fmt_with(names), k),
                _ => format!("({})^{}", b.fmt_with(names), k),
            },
            ExpPoly::Exp(a) => format!("exp({})", a.fmt_with(names)),
        }
    }
}

type Term = Vec<(String, u32)>;

/// Expanded form: a sum of coefficient times product of atoms, where atoms
/// are variables and exponentials of expanded arguments.
#[derive(Clone, Debug, Default)]
struct Expansion {
    terms: BTreeMap<Term, Const>,
    atoms: BTreeMap<String, ExpPoly>,
}

impl Expansion {
    fn constant(c: Const) -> Self {
        let mut e = Expansion::default();
        if !c.is_zero() {
            e.terms.insert(Vec::new(), c);
        }
        e
    }

    fn atom(key: String, expr: ExpPoly) -> Self {
        let mut e = Expansion::default();
        e.terms.insert(vec![(key.clone(), 1)], Const::Exact(GaussianRational::one()));
        e.atoms.insert(key, expr);
        e
    }

    fn as_constant(&self) -> Option<Const> {
        match self.terms.len() {
            0 => Some(Const::Exact(GaussianRational::zero())),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, t: Term, c: Const) {
        let next = match self.terms.get(&t) {
            Some(old) => old.add(&c),
            None => c,
        };
        if next.is_zero() {
            self.terms.remove(&t);
        } else {
            self.terms.insert(t, next);
        }
    }

    fn add(mut self, other: Expansion) -> Self {
        self.atoms.extend(other.atoms);
        for (t, c) in other.terms {
            self.add_term(t, c);
        }
        self
    }

    fn mul(&self, other: &Expansion) -> Self {
        let mut out = Expansion { terms: BTreeMap::new(), atoms: self.atoms.clone() };
        out.atoms.extend(other.atoms.clone());
        for (ta, ca) in &self.terms {
            for (tb, cb) in &other.terms {
                let mut merged: BTreeMap<String, u32> = ta.iter().cloned().collect();
                for (k, e) in tb {
                    *merged.entry(k.clone()).or_insert(0) += e;
                }
                out.add_term(merged.into_iter().collect(), ca.mul(cb));
            }
        }
        out
    }

    fn key(&self) -> String {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(t, c)| {
                let atoms: Vec<String> = t.iter().map(|(k, e)| format!("{k}^{e}")).collect();
                format!("{c:?}*{}", atoms.join("*"))
            })
            .collect();
        parts.join("+")
    }

    fn to_expr(&self) -> ExpPoly {
        let terms = self
            .terms
            .iter()
            .map(|(t, c)| {
                let mut factors = vec![ExpPoly::Const(c.clone())];
                for (k, e) in t {
                    factors.push(ExpPoly::pow(self.atoms[k].clone(), *e));
                }
                ExpPoly::Product(factors)
            })
            .collect();
        ExpPoly::Sum(terms).simplify()
    }
}

impl ExpPoly {
    fn expansion(&self) -> Expansion {
        match self {
            ExpPoly::Const(c) => Expansion::constant(c.clone()),
            ExpPoly::Var(i) => Expansion::atom(format!("x{i:06}"), ExpPoly::Var(*i)),
            ExpPoly::Sum(items) => items.iter().fold(Expansion::default(), |acc, e| acc.add(e.expansion())),
            ExpPoly::Product(items) => items
                .iter()
                .fold(Expansion::constant(Const::Exact(GaussianRational::one())), |acc, e| acc.mul(&e.expansion())),
            ExpPoly::Pow(b, k) => {
                let base = b.expansion();
                (0..*k).fold(Expansion::constant(Const::Exact(GaussianRational::one())), |acc, _| acc.mul(&base))
            }
            ExpPoly::Exp(a) => {
                let arg = a.expansion();
                match arg.as_constant() {
                    Some(c) if c.is_zero() => Expansion::constant(Const::Exact(GaussianRational::one())),
                    Some(c) => Expansion::constant(Const::Float(c.to_c64().exp())),
                    None => Expansion::atom(format!("exp({})", arg.key()), ExpPoly::exp(arg.to_expr())),
                }
            }
        }
    }

    /// Fully expanded normal form: products distributed over sums and like
    /// terms collected, with variables and exponentials as atoms.
    pub fn expand(&self) -> ExpPoly {
        self.expansion().to_expr()
    }

    /// True when the expanded normal form vanishes.
    pub fn is_identically_zero(&self) -> bool {
        self.expansion().terms.is_empty()
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.max_var().map_or(0, |m| m + 1);
        write!(f, "{}", self.fmt_with(&VarNames::indexed(n)))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && i + 1 < bytes.len() && bytes[i + 1].is_ascii_digit()) {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut frac = "";
            if i < bytes.len() && bytes[i] == b'.' {
                let fs = i + 1;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                frac = &text[fs..i];
            }
            let int_part = &text[start..start + text[start..].find(|ch: char| !ch.is_ascii_digit()).unwrap_or(i - start)];
            let digits = format!("{int_part}{frac}");
            let digits = if digits.is_empty() { "0".to_string() } else { digits };
            let numer: num_bigint::BigInt = digits
                .parse()
                .map_err(|_| ParseError::at(text, start, "malformed number"))?;
            let denom = num_bigint::BigInt::from(10u32).pow(frac.len() as u32);
            out.push((Tok::Num(BigRational::new(numer, denom)), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            return Err(ParseError::at(text, i, format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: &'a VarNames,
}

impl<'a> Parser<'a> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.text.len(), |t| t.1)
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError::at(self.text, self.offset(), msg)
    }

    fn peek_op(&self) -> Option<char> {
        match self.toks.get(self.pos) {
            Some((Tok::Op(c), _)) => Some(*c),
            _ => None,
        }
    }

    fn expect_op(&mut self, c: char) -> Result<(), ParseError> {
        if self.peek_op() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<ExpPoly, ParseError> {
        let mut terms = vec![self.term()?];
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let t = self.term()?;
            terms.push(if c == '-' { ExpPoly::Product(vec![ExpPoly::int(-1), t]) } else { t });
        }
        Ok(if terms.len() == 1 { terms.pop().expect("one") } else { ExpPoly::Sum(terms) })
    }

    fn term(&mut self) -> Result<ExpPoly, ParseError> {
        let mut factors = vec![self.unary()?];
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let at = self.offset();
            let f = self.unary()?;
            if c == '/' {
                let inv = match f.simplify() {
                    ExpPoly::Const(Const::Exact(g)) => g.inv(),
                    _ => None,
                };
                match inv {
                    Some(g) => factors.push(ExpPoly::exact(g)),
                    None => {
                        return Err(ParseError::at(
                            self.text,
                            at,
                            "division is only allowed by a nonzero exact constant",
                        ))
                    }
                }
            } else {
                factors.push(f);
            }
        }
        Ok(if factors.len() == 1 { factors.pop().expect("one") } else { ExpPoly::Product(factors) })
    }

    fn unary(&mut self) -> Result<ExpPoly, ParseError> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(ExpPoly::Product(vec![ExpPoly::int(-1), self.unary()?]))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<ExpPoly, ParseError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            match self.toks.get(self.pos) {
                Some((Tok::Num(r), _)) if r.is_integer() => {
                    let k: u32 = r
                        .to_integer()
                        .try_into()
                        .map_err(|_| self.err("exponent too large"))?;
                    self.pos += 1;
                    return Ok(ExpPoly::Pow(Box::new(base), k));
                }
                _ => return Err(self.err("exponent must be a non-negative integer")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExpPoly, ParseError> {
        let Some((tok, _)) = self.toks.get(self.pos).cloned() else {
            return Err(self.err("unexpected end of input"));
        };
        match tok {
            Tok::Num(r) => {
                self.pos += 1;
                Ok(ExpPoly::exact(GaussianRational::from(r)))
            }
            Tok::Op('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(idx) = self.names.index_of(&name) {
                    self.pos += 1;
                    return Ok(ExpPoly::Var(idx));
                }
                match name.as_str() {
                    "i" => {
                        self.pos += 1;
                        Ok(ExpPoly::exact(GaussianRational::i()))
                    }
                    "exp" => {
                        self.pos += 1;
                        self.expect_op('(')?;
                        let e = self.expr()?;
                        self.expect_op(')')?;
                        Ok(ExpPoly::exp(e))
                    }
                    _ => Err(self.err(format!("unknown variable '{name}'"))),
                }
            }
            Tok::Op(c) => Err(self.err(format!("unexpected '{c}'"))),
        }
    }
}

/// Parses an expression over `names`; the result is simplified.
pub fn parse_expr(text: &str, names: &VarNames) -> Result<ExpPoly, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser { text, toks, pos: 0, names };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e.simplify())
}
