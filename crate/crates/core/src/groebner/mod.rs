//! Buchberger's algorithm with elimination orders.
//!
//! Working polynomials are kept primitive over the integers and reduced
//! fraction-free. Pairs are pruned with the Gebauer–Möller installation of
//! Buchberger's coprime and chain criteria.

mod ipoly;
pub mod linear;
pub mod quotient;

pub use quotient::{minimal_polynomial, standard_monomials, univariate_eliminant};

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Monomial, MonomialOrder, Polynomial, Ring, Scalar};
use crate::error::{Error, Result};
use ipoly::{cancel_pair, scaled_sub_terms, IPoly, Mono};

/// Default cap on reduction steps for a single Buchberger run.
pub const DEFAULT_MAX_REDUCTIONS: u64 = 1_000_000;

/// Critical-pair selection strategy.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSelection {
    /// Smallest lcm degree first.
    #[default]
    Normal,
    /// Smallest sugar degree first.
    Sugar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroebnerConfig {
    pub max_reductions: u64,
    pub selection: PairSelection,
    /// Substitute away eliminated variables that occur linearly with a
    /// constant coefficient before running Buchberger.
    pub pre_eliminate: bool,
}

impl Default for GroebnerConfig {
    fn default() -> Self {
        GroebnerConfig {
            max_reductions: DEFAULT_MAX_REDUCTIONS,
            selection: PairSelection::default(),
            pre_eliminate: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PolySystem {
    pub ring: Arc<Ring>,
    pub generators: Vec<Polynomial>,
    pub order: MonomialOrder,
}

impl PolySystem {
    pub fn new(ring: &Arc<Ring>, generators: Vec<Polynomial>, order: MonomialOrder) -> Result<Self> {
        for g in &generators {
            if g.ring() != ring {
                return Err(Error::RingMismatch(format!(
                    "generator `{g}` is not in the system ring"
                )));
            }
        }
        Ok(PolySystem {
            ring: ring.clone(),
            generators: generators.into_iter().filter(|g| !g.is_zero()).collect(),
            order,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroebnerStats {
    pub reductions: u64,
    pub pairs_processed: u64,
    pub pairs_pruned: u64,
    pub zero_reductions: u64,
}

#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    pub basis: Vec<Polynomial>,
    pub order: MonomialOrder,
    pub reduced: bool,
    pub stats: GroebnerStats,
}

impl GroebnerBasis {
    /// True when the basis is `{1}`.
    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_constant()
    }
}

/// Multivariate division remainder of `p` by `g` (over the rationals).
pub fn normal_form(p: &Polynomial, g: &[Polynomial], order: MonomialOrder) -> Polynomial {
    let ring = p.ring().clone();
    let divisors: Vec<(Monomial, Scalar, &Polynomial)> = g
        .iter()
        .filter(|q| !q.is_zero())
        .map(|q| {
            let (m, c) = q.leading_term(order).unwrap();
            (m.clone(), c.clone(), q)
        })
        .collect();
    let mut rest = p.clone();
    let mut rem = Polynomial::zero(&ring);
    while let Some((lm, lc)) = rest.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
        match divisors.iter().find(|(m, _, _)| m.divides(&lm)) {
            Some((m, c, q)) => {
                let shift = lm.div(m).unwrap();
                rest = &rest - &q.mul_monomial(&shift, &(&lc / c));
            }
            None => {
                let t = Polynomial::from_terms(&ring, [(lm, lc)]);
                rest = &rest - &t;
                rem = &rem + &t;
            }
        }
    }
    rem
}

/// S-polynomial of two nonzero polynomials.
pub fn s_polynomial(f: &Polynomial, g: &Polynomial, order: MonomialOrder) -> Polynomial {
    let (mf, cf) = f.leading_term(order).unwrap();
    let (mg, cg) = g.leading_term(order).unwrap();
    let l = mf.lcm(mg);
    let a = f.mul_monomial(&l.div(mf).unwrap(), &cf.recip());
    let b = g.mul_monomial(&l.div(mg).unwrap(), &cg.recip());
    &a - &b
}

/// Definitional check: every S-polynomial of `basis` reduces to zero.
pub fn is_groebner_basis(basis: &[Polynomial], order: MonomialOrder) -> bool {
    let nonzero: Vec<&Polynomial> = basis.iter().filter(|p| !p.is_zero()).collect();
    let ipolys: Vec<IPoly> = nonzero.iter().map(|p| IPoly::from_poly(p, order)).collect();
    let mut engine = Engine::new(order, u64::MAX, PairSelection::Normal);
    for p in ipolys {
        engine.push_basis_element(p);
    }
    for i in 0..engine.polys.len() {
        for j in (i + 1)..engine.polys.len() {
            let s = engine.spoly(i, j);
            match engine.reduce(s) {
                Ok((r, _)) if r.is_zero() => {}
                _ => return false,
            }
        }
    }
    true
}

/// Reduced Gröbner basis of the ideal generated by `system`.
pub fn buchberger(system: &PolySystem, config: &GroebnerConfig) -> Result<GroebnerBasis> {
    if system.generators.is_empty() {
        return Err(Error::Invalid("empty generator list".into()));
    }
    let order = system.order;
    let mut engine = Engine::new(order, config.max_reductions, config.selection);
    let mut input: Vec<IPoly> = system.generators.iter().map(|g| IPoly::from_poly(g, order)).collect();
    // small leading monomials first gives a deterministic, usually cheaper start
    input.sort_by(|a, b| a.lm().cmp_order(b.lm()).then(a.terms.len().cmp(&b.terms.len())));
    for g in input {
        let sugar = g.terms.iter().map(|t| t.0.deg).max().unwrap_or(0);
        let (r, s) = engine.reduce_onto(Vec::new(), g, sugar)?;
        if !r.is_zero() {
            engine.insert(r, s);
        }
    }
    while let Some(pair) = engine.next_pair() {
        engine.stats.pairs_processed += 1;
        let s = engine.spoly(pair.i, pair.j);
        let (r, sugar) = engine.reduce_onto(Vec::new(), s, pair.sugar).map_err(|e| match e {
            Error::BudgetExhausted { reductions, .. } => Error::BudgetExhausted {
                reductions,
                pairs_left: engine.pairs.len() + 1,
            },
            other => other,
        })?;
        if r.is_zero() {
            engine.stats.zero_reductions += 1;
        } else {
            engine.insert(r, sugar);
        }
    }
    let basis = engine.reduced_basis(&system.ring)?;
    Ok(GroebnerBasis {
        basis,
        order,
        reduced: true,
        stats: engine.stats,
    })
}

/// Generators of `I ∩ Q[keep]`, computed with a block elimination order.
pub fn elimination_ideal(system: &PolySystem, keep: &[&str], config: &GroebnerConfig) -> Result<Vec<Polynomial>> {
    elimination_ideal_with_stats(system, keep, config).map(|r| r.0)
}

/// [`elimination_ideal`] together with the Buchberger counters.
pub fn elimination_ideal_with_stats(
    system: &PolySystem,
    keep: &[&str],
    config: &GroebnerConfig,
) -> Result<(Vec<Polynomial>, GroebnerStats)> {
    for k in keep {
        system.ring.require(k)?;
    }
    let ring = &system.ring;
    let elim: Vec<String> = ring
        .names()
        .iter()
        .filter(|v| !keep.contains(&v.as_str()))
        .cloned()
        .collect();
    if elim.is_empty() {
        let gb = buchberger(system, config)?;
        return Ok((gb.basis, gb.stats));
    }

    let mut gens = system.generators.clone();
    let mut remaining = elim.clone();
    if config.pre_eliminate {
        let red = linear::substitute_unit_linear(&gens, &remaining)?;
        gens = red.generators;
        remaining = red.remaining;
    }
    gens.retain(|g| !g.is_zero());
    if gens.is_empty() {
        return Ok((Vec::new(), GroebnerStats::default()));
    }

    // eliminated block first, then the kept variables in their ring order
    let kept: Vec<String> = ring
        .names()
        .iter()
        .filter(|v| keep.contains(&v.as_str()))
        .cloned()
        .collect();
    let block_ring = Ring::new(remaining.iter().chain(kept.iter()).cloned());
    let moved: Vec<Polynomial> = gens.iter().map(|g| g.embed(&block_ring)).collect::<Result<_>>()?;
    let block = PolySystem::new(&block_ring, moved, MonomialOrder::Block { split: remaining.len() })?;
    let gb = buchberger(&block, config)?;
    let basis = gb
        .basis
        .iter()
        .filter(|p| (0..remaining.len()).all(|i| !p.involves(i)))
        .map(|p| p.embed(ring))
        .collect::<Result<Vec<_>>>()?;
    Ok((basis, gb.stats))
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
    sugar: u32,
}

struct Engine {
    order: MonomialOrder,
    polys: Vec<IPoly>,
    sugars: Vec<u32>,
    active: Vec<bool>,
    pairs: Vec<Pair>,
    budget: u64,
    selection: PairSelection,
    stats: GroebnerStats,
}

impl Engine {
    fn new(order: MonomialOrder, budget: u64, selection: PairSelection) -> Engine {
        Engine {
            order,
            polys: Vec::new(),
            sugars: Vec::new(),
            active: Vec::new(),
            pairs: Vec::new(),
            budget,
            selection,
            stats: GroebnerStats::default(),
        }
    }

    fn push_basis_element(&mut self, p: IPoly) {
        let s = p.terms.iter().map(|t| t.0.deg).max().unwrap_or(0);
        self.polys.push(p);
        self.sugars.push(s);
        self.active.push(true);
    }

    fn spoly(&self, i: usize, j: usize) -> IPoly {
        let (f, g) = (&self.polys[i], &self.polys[j]);
        let l = f.lm().lcm(self.order, g.lm());
        let uf = l.div(self.order, f.lm());
        let ug = l.div(self.order, g.lm());
        let (a, b) = cancel_pair(f.lc(), g.lc());
        let shifted = IPoly {
            terms: f
                .terms
                .iter()
                .map(|(m, c)| (m.mul(self.order, &uf), c.clone()))
                .collect(),
        };
        let mut out = shifted.scaled_sub(&a, &b, &ug, g, self.order);
        out.make_primitive();
        out
    }

    fn find_reducer(&self, m: &Mono) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (k, p) in self.polys.iter().enumerate() {
            if self.active[k] && p.lm().divides(m) {
                match best {
                    Some(b) if self.polys[b].terms.len() <= p.terms.len() => {}
                    _ => best = Some(k),
                }
            }
        }
        best
    }

    fn reduce(&mut self, p: IPoly) -> Result<(IPoly, u32)> {
        let s = p.terms.iter().map(|t| t.0.deg).max().unwrap_or(0);
        self.reduce_onto(Vec::new(), p, s)
    }

    /// Full fraction-free reduction of `p` by the active basis. Irreducible
    /// terms are appended to `rem`, which is rescaled alongside.
    fn reduce_onto(&mut self, mut rem: Vec<(Mono, BigInt)>, p: IPoly, mut sugar: u32) -> Result<(IPoly, u32)> {
        let order = self.order;
        let mut terms = p.terms;
        let mut start = 0;
        let mut since_content = 0u32;
        while start < terms.len() {
            let lm = terms[start].0.clone();
            let Some(k) = self.find_reducer(&lm) else {
                let c = std::mem::replace(&mut terms[start].1, BigInt::zero());
                rem.push((lm, c));
                start += 1;
                continue;
            };
            if self.stats.reductions >= self.budget {
                return Err(Error::BudgetExhausted {
                    reductions: self.stats.reductions,
                    pairs_left: self.pairs.len(),
                });
            }
            self.stats.reductions += 1;
            let g = &self.polys[k];
            let (a, b) = cancel_pair(&terms[start].1, g.lc());
            let shift = lm.div(order, g.lm());
            sugar = sugar.max(shift.deg + self.sugars[k]);
            terms = scaled_sub_terms(&terms[start..], &a, &b, &shift, g, order);
            start = 0;
            if !a.is_one() {
                for t in rem.iter_mut() {
                    t.1 *= &a;
                }
            }
            since_content += 1;
            if since_content >= 4 {
                since_content = 0;
                shrink_content(&mut terms, &mut rem);
            }
        }
        let mut out = IPoly { terms: rem };
        out.make_primitive();
        Ok((out, sugar))
    }

    /// Gebauer–Möller update with the new element `h`.
    fn insert(&mut self, h: IPoly, sugar: u32) {
        let order = self.order;
        let hi = self.polys.len();
        let hlm = h.lm().clone();
        self.polys.push(h);
        self.sugars.push(sugar);
        self.active.push(true);

        let candidates: Vec<Pair> = (0..hi)
            .filter(|&k| self.active[k])
            .map(|k| {
                let g = &self.polys[k];
                let lcm = hlm.lcm(order, g.lm());
                let s = (sugar + lcm.deg - hlm.deg).max(self.sugars[k] + lcm.deg - g.lm().deg);
                Pair {
                    i: k,
                    j: hi,
                    lcm,
                    sugar: s,
                }
            })
            .collect();

        // chain criterion among the new pairs
        let mut kept: Vec<Pair> = Vec::new();
        for (idx, p) in candidates.iter().enumerate() {
            let coprime = hlm.coprime(self.polys[p.i].lm());
            let dominated = candidates
                .iter()
                .enumerate()
                .any(|(o, q)| o != idx && q.lcm.divides(&p.lcm) && (q.lcm != p.lcm || o < idx));
            if coprime || !dominated {
                kept.push(p.clone());
            } else {
                self.stats.pairs_pruned += 1;
            }
        }
        // product criterion
        let before = kept.len();
        kept.retain(|p| !hlm.coprime(self.polys[p.i].lm()));
        self.stats.pairs_pruned += (before - kept.len()) as u64;

        // old pairs made redundant by h
        let polys = &self.polys;
        let before = self.pairs.len();
        self.pairs.retain(|p| {
            !(hlm.divides(&p.lcm)
                && hlm.lcm(order, polys[p.i].lm()) != p.lcm
                && hlm.lcm(order, polys[p.j].lm()) != p.lcm)
        });
        self.stats.pairs_pruned += (before - self.pairs.len()) as u64;
        self.pairs.extend(kept);

        for k in 0..hi {
            if self.active[k] && hlm.divides(self.polys[k].lm()) {
                self.active[k] = false;
            }
        }
    }

    fn next_pair(&mut self) -> Option<Pair> {
        if self.pairs.is_empty() {
            return None;
        }
        let key = |p: &Pair| match self.selection {
            PairSelection::Normal => p.lcm.deg,
            PairSelection::Sugar => p.sugar,
        };
        let mut best = 0;
        for k in 1..self.pairs.len() {
            let (a, b) = (&self.pairs[k], &self.pairs[best]);
            let better = key(a)
                .cmp(&key(b))
                .then_with(|| a.lcm.cmp_order(&b.lcm))
                .then_with(|| (a.j, a.i).cmp(&(b.j, b.i)));
            if better == std::cmp::Ordering::Less {
                best = k;
            }
        }
        Some(self.pairs.swap_remove(best))
    }

    fn reduced_basis(&mut self, ring: &Arc<Ring>) -> Result<Vec<Polynomial>> {
        let order = self.order;
        let idx: Vec<usize> = (0..self.polys.len()).filter(|&k| self.active[k]).collect();
        let mut out = Vec::with_capacity(idx.len());
        for &k in &idx {
            self.active[k] = false;
            let mut p = self.polys[k].clone();
            let head = p.terms.remove(0);
            let (r, _) = self.reduce_onto(vec![head], p, 0)?;
            self.active[k] = true;
            out.push(r.to_poly(ring).monic(order));
        }
        out.sort_by(|a, b| {
            let la = a.leading_term(order).unwrap().0;
            let lb = b.leading_term(order).unwrap().0;
            order.cmp(la, lb)
        });
        Ok(out)
    }
}

fn shrink_content(p: &mut [(Mono, BigInt)], rem: &mut [(Mono, BigInt)]) {
    let mut g = BigInt::zero();
    for (_, c) in p.iter().chain(rem.iter()) {
        g = g.gcd(c);
        if g.is_one() {
            return;
        }
    }
    if g.is_zero() {
        return;
    }
    for (_, c) in p.iter_mut().chain(rem.iter_mut()) {
        *c /= &g;
    }
}
