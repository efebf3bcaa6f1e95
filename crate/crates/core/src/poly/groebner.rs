//! Buchberger's algorithm with the sugar selection strategy.

use std::collections::{BTreeMap, HashSet};

use num_traits::Zero;

use super::{Ideal, Monomial, MonomialOrder, Poly, PolyError};
use crate::scalar::GaussianRational;

/// Environment variable bounding the S-pair queue.
pub const MAX_PAIRS_ENV: &str = "LG_MAX_PAIRS";
const DEFAULT_MAX_PAIRS: usize = 200_000;

#[derive(Clone, Debug)]
pub struct BuchbergerConfig {
    pub max_pairs: usize,
}

impl Default for BuchbergerConfig {
    fn default() -> Self {
        let max_pairs = std::env::var(MAX_PAIRS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(DEFAULT_MAX_PAIRS);
        BuchbergerConfig { max_pairs }
    }
}

/// A reduced Gröbner basis: monic, leading monomials pairwise non-divisible,
/// sorted by increasing leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    basis: Vec<Poly>,
    leading: Vec<Monomial>,
    order: MonomialOrder,
    source: Ideal,
}

impl GroebnerBasis {
    pub fn basis(&self) -> &[Poly] {
        &self.basis
    }

    pub fn leading_monomials(&self) -> &[Monomial] {
        &self.leading
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn source(&self) -> &Ideal {
        &self.source
    }

    pub fn nvars(&self) -> usize {
        self.source.nvars()
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.leading.iter().any(Monomial::is_one)
    }

    /// Ideal membership via normal form.
    pub fn contains(&self, p: &Poly) -> Result<bool, PolyError> {
        Ok(normal_form(p, self)?.is_zero())
    }
}

/// Working polynomial keyed by the order key, so the leading term is the last entry.
struct Work<'o> {
    order: &'o MonomialOrder,
    terms: BTreeMap<Vec<i64>, (Monomial, GaussianRational)>,
}

impl<'o> Work<'o> {
    fn new(p: &Poly, order: &'o MonomialOrder) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| (order.key(m), (m.clone(), c.clone())))
            .collect();
        Work { order, terms }
    }

    fn pop_leading(&mut self) -> Option<(Monomial, GaussianRational)> {
        self.terms.pop_last().map(|(_, v)| v)
    }

    /// `self -= c · m · g`
    fn sub_multiple(&mut self, g: &Poly, m: &Monomial, c: &GaussianRational) {
        for (t, a) in g.terms() {
            let mono = t.mul(m);
            let key = self.order.key(&mono);
            let delta = a * c;
            match self.terms.entry(key) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert((mono, -delta));
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    o.get_mut().1 -= &delta;
                    if o.get().1.is_zero() {
                        o.remove();
                    }
                }
            }
        }
    }
}

/// Fully reduces `p` by monic divisors (leading monomial listed alongside).
fn reduce_by(p: &Poly, divisors: &[(&Monomial, &Poly)], order: &MonomialOrder) -> Poly {
    let mut work = Work::new(p, order);
    let mut rem = Poly::zero(p.nvars());
    while let Some((m, c)) = work.pop_leading() {
        let hit = divisors.iter().find_map(|(lm, g)| m.div(lm).map(|q| (q, *g)));
        match hit {
            Some((q, g)) => {
                // g is monic, so its leading term cancels exactly; drop it up front
                let mut tail = g.clone();
                let lead = g.leading_monomial(order).expect("nonzero divisor").clone();
                tail.add_term(lead.clone(), -g.coeff(&lead));
                work.sub_multiple(&tail, &q, &c);
            }
            None => rem.add_term(m, c),
        }
    }
    rem
}

/// Normal form of `p` with respect to a Gröbner basis.
pub fn normal_form(p: &Poly, gb: &GroebnerBasis) -> Result<Poly, PolyError> {
    if p.nvars() != gb.nvars() {
        return Err(PolyError::DimensionMismatch { expected: gb.nvars(), found: p.nvars() });
    }
    let divs: Vec<(&Monomial, &Poly)> = gb.leading.iter().zip(&gb.basis).collect();
    Ok(reduce_by(p, &divs, &gb.order))
}

/// Reduced Gröbner basis with the default resource configuration.
pub fn buchberger(ideal: &Ideal, order: &MonomialOrder) -> Result<GroebnerBasis, PolyError> {
    buchberger_with(ideal, order, &BuchbergerConfig::default())
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    sugar: u32,
}

pub fn buchberger_with(
    ideal: &Ideal,
    order: &MonomialOrder,
    config: &BuchbergerConfig,
) -> Result<GroebnerBasis, PolyError> {
    let n = ideal.nvars();
    if order.nvars() != n {
        return Err(PolyError::DimensionMismatch { expected: n, found: order.nvars() });
    }

    let mut polys: Vec<Poly> = Vec::new();
    let mut lms: Vec<Monomial> = Vec::new();
    let mut sugars: Vec<u32> = Vec::new();
    let mut queue: Vec<Pair> = Vec::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();

    let push = |h: Poly,
                sugar: u32,
                polys: &mut Vec<Poly>,
                lms: &mut Vec<Monomial>,
                sugars: &mut Vec<u32>,
                queue: &mut Vec<Pair>,
                pending: &mut HashSet<(usize, usize)>|
     -> Result<(), PolyError> {
        let h = h.monic(order);
        let lm = h.leading_monomial(order).expect("nonzero").clone();
        let j = polys.len();
        for i in 0..j {
            if lms[i].coprime(&lm) {
                continue;
            }
            let lcm = lms[i].lcm(&lm);
            let s = (sugars[i] + lcm.degree() - lms[i].degree())
                .max(sugar + lcm.degree() - lm.degree());
            queue.push(Pair { i, j, lcm, sugar: s });
            pending.insert((i, j));
        }
        polys.push(h);
        lms.push(lm);
        sugars.push(sugar);
        if queue.len() > config.max_pairs {
            return Err(PolyError::PairQueueLimit(queue.len()));
        }
        Ok(())
    };

    for g in ideal.generators() {
        let sugar = g.total_degree().unwrap_or(0);
        push(g.clone(), sugar, &mut polys, &mut lms, &mut sugars, &mut queue, &mut pending)?;
    }

    while !queue.is_empty() {
        // sugar first, then lcm under the order, then input indices
        let best = (0..queue.len())
            .min_by(|&a, &b| {
                let (pa, pb) = (&queue[a], &queue[b]);
                pa.sugar
                    .cmp(&pb.sugar)
                    .then_with(|| order.cmp(&pa.lcm, &pb.lcm))
                    .then_with(|| (pa.i, pa.j).cmp(&(pb.i, pb.j)))
            })
            .expect("non-empty queue");
        let pair = queue.swap_remove(best);
        pending.remove(&(pair.i, pair.j));

        let chain = (0..polys.len()).any(|k| {
            k != pair.i
                && k != pair.j
                && lms[k].divides(&pair.lcm)
                && !pending.contains(&(pair.i.min(k), pair.i.max(k)))
                && !pending.contains(&(pair.j.min(k), pair.j.max(k)))
        });
        if chain {
            continue;
        }

        let (gi, gj) = (&polys[pair.i], &polys[pair.j]);
        let qi = pair.lcm.div(&lms[pair.i]).expect("lcm divisible");
        let qj = pair.lcm.div(&lms[pair.j]).expect("lcm divisible");
        let one = GaussianRational::from_int(1);
        let s = &gi.mul_term(&qi, &one) - &gj.mul_term(&qj, &one);
        let divs: Vec<(&Monomial, &Poly)> = lms.iter().zip(&polys).collect();
        let h = reduce_by(&s, &divs, order);
        if !h.is_zero() {
            push(h, pair.sugar, &mut polys, &mut lms, &mut sugars, &mut queue, &mut pending)?;
        }
    }

    // minimalize: drop elements whose leading monomial is divisible by another
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..polys.len() {
        let redundant = (0..polys.len()).any(|k| {
            k != i && lms[k].divides(&lms[i]) && (lms[k] != lms[i] || k < i)
        });
        if !redundant {
            keep.push(i);
        }
    }

    // inter-reduce tails
    let mut reduced: Vec<Poly> = Vec::with_capacity(keep.len());
    for &i in &keep {
        let divs: Vec<(&Monomial, &Poly)> = keep
            .iter()
            .filter(|&&k| k != i)
            .map(|&k| (&lms[k], &polys[k]))
            .collect();
        let lead = lms[i].clone();
        let mut tail = polys[i].clone();
        let lc = tail.coeff(&lead);
        tail.add_term(lead.clone(), -lc.clone());
        let mut r = reduce_by(&tail, &divs, order);
        r.add_term(lead, lc);
        reduced.push(r.monic(order));
    }
    reduced.sort_by(|a, b| {
        order.cmp(
            a.leading_monomial(order).expect("nonzero"),
            b.leading_monomial(order).expect("nonzero"),
        )
    });
    let leading = reduced
        .iter()
        .map(|p| p.leading_monomial(order).expect("nonzero").clone())
        .collect();

    Ok(GroebnerBasis { basis: reduced, leading, order: order.clone(), source: ideal.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::VarNames;

    fn p(s: &str, n: usize) -> Poly {
        Poly::parse(s, &VarNames::indexed(n)).unwrap()
    }

    fn gb(gens: &[&str], n: usize, order: MonomialOrder) -> GroebnerBasis {
        let ideal = Ideal::new(n, gens.iter().map(|g| p(g, n)).collect()).unwrap();
        buchberger(&ideal, &order).unwrap()
    }

    #[test]
    fn single_generator_already_reduced() {
        let g = gb(&["x1^2 - 1"], 1, MonomialOrder::lex(1));
        assert_eq!(g.basis(), &[p("x1^2 - 1", 1)]);
    }

    #[test]
    fn unit_normalization() {
        // (n+1) x^n with n = 2
        let g = gb(&["3*x1^2"], 1, MonomialOrder::lex(1));
        assert_eq!(g.basis(), &[p("x1^2", 1)]);
    }

    #[test]
    fn textbook_lex_basis() {
        // Cox-Little-O'Shea: <x^2 y - 1, x y^2 - x> under lex x > y
        let g = gb(&["x1^2*x2 - 1", "x1*x2^2 - x1"], 2, MonomialOrder::lex(2));
        let expected = vec![p("x2^2 - 1", 2), p("x1^2 - x2", 2)];
        assert_eq!(g.basis(), expected.as_slice());
    }

    #[test]
    fn normal_form_examples() {
        let g = gb(&["x1^2"], 1, MonomialOrder::grevlex(1));
        assert!(normal_form(&p("x1^3", 1), &g).unwrap().is_zero());
        assert_eq!(normal_form(&p("x1 + 1", 1), &g).unwrap(), p("x1 + 1", 1));
        assert!(matches!(
            normal_form(&p("x1", 2), &g),
            Err(PolyError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn unit_ideal() {
        let g = gb(&["x1", "x1 - 1"], 1, MonomialOrder::lex(1));
        assert!(g.is_unit_ideal());
        assert_eq!(g.basis(), &[Poly::one(1)]);
    }

    #[test]
    fn pair_queue_limit() {
        let ideal = Ideal::new(
            3,
            vec![p("x1*x2*x3 - 1", 3), p("x1*x3 - x2*x3", 3), p("x1*x2 - x2*x3", 3)],
        )
        .unwrap();
        let err = buchberger_with(&ideal, &MonomialOrder::grevlex(3), &BuchbergerConfig { max_pairs: 1 })
            .unwrap_err();
        assert!(matches!(err, PolyError::PairQueueLimit(_)));
    }

    #[test]
    fn deterministic() {
        let gens = ["x1*x2*x3 - 1", "x1*x3 - x2*x3", "x1*x2 - x2*x3"];
        let a = gb(&gens, 3, MonomialOrder::grevlex(3));
        let b = gb(&gens, 3, MonomialOrder::grevlex(3));
        assert_eq!(a.basis(), b.basis());
    }
}
