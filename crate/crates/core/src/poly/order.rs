use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::Monomial;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    Grlex,
    Grevlex,
}

/// A monomial order together with a variable priority permutation:
/// `perm[0]` is the most significant variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    perm: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, nvars: usize) -> Self {
        MonomialOrder { kind, perm: (0..nvars).collect() }
    }

    /// Panics unless `perm` is a permutation of `0..perm.len()`.
    pub fn with_permutation(kind: OrderKind, perm: Vec<usize>) -> Self {
        let mut seen = vec![false; perm.len()];
        for &p in &perm {
            assert!(p < perm.len() && !seen[p], "not a permutation: {perm:?}");
            seen[p] = true;
        }
        MonomialOrder { kind, perm }
    }

    pub fn lex(nvars: usize) -> Self {
        Self::new(OrderKind::Lex, nvars)
    }

    pub fn grlex(nvars: usize) -> Self {
        Self::new(OrderKind::Grlex, nvars)
    }

    pub fn grevlex(nvars: usize) -> Self {
        Self::new(OrderKind::Grevlex, nvars)
    }

    pub fn nvars(&self) -> usize {
        self.perm.len()
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        let (ea, eb) = (a.exps(), b.exps());
        let lex = || {
            for &v in &self.perm {
                match ea[v].cmp(&eb[v]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        };
        match self.kind {
            OrderKind::Lex => lex(),
            OrderKind::Grlex => a.degree().cmp(&b.degree()).then_with(lex),
            OrderKind::Grevlex => a.degree().cmp(&b.degree()).then_with(|| {
                // the last variable with differing exponent decides, smaller exponent wins
                for &v in self.perm.iter().rev() {
                    match ea[v].cmp(&eb[v]) {
                        Ordering::Equal => continue,
                        o => return o.reverse(),
                    }
                }
                Ordering::Equal
            }),
        }
    }

    /// A key whose lexicographic comparison reproduces this order.
    pub fn key(&self, m: &Monomial) -> Vec<i64> {
        let e = m.exps();
        let mut k = Vec::with_capacity(e.len() + 1);
        match self.kind {
            OrderKind::Lex => k.extend(self.perm.iter().map(|&v| e[v] as i64)),
            OrderKind::Grlex => {
                k.push(m.degree() as i64);
                k.extend(self.perm.iter().map(|&v| e[v] as i64));
            }
            OrderKind::Grevlex => {
                k.push(m.degree() as i64);
                k.extend(self.perm.iter().rev().map(|&v| -(e[v] as i64)));
            }
        }
        k
    }
}
