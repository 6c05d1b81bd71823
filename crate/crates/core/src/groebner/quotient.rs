//! Linear algebra in the quotient ring of a zero-dimensional ideal.
//!
//! The generator of `I ∩ Q[t]` is the minimal polynomial of multiplication
//! by `t` on `Q[x]/I`, found from the first linear dependency among the
//! normal forms of `1, t, t^2, ...`.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::{buchberger, normal_form, GroebnerBasis, GroebnerConfig, GroebnerStats, PolySystem};
use crate::algebra::{Monomial, MonomialOrder, Polynomial, Scalar};
use crate::error::{Error, Result};

/// Monomials not divisible by any leading monomial of `basis`, or `None`
/// when there are infinitely many (the ideal is not zero-dimensional).
pub fn standard_monomials(basis: &GroebnerBasis, limit: usize) -> Option<Vec<Monomial>> {
    let leads: Vec<Monomial> = basis
        .basis
        .iter()
        .map(|p| p.leading_term(basis.order).unwrap().0.clone())
        .collect();
    let nvars = basis.basis.first()?.ring().nvars();
    for v in 0..nvars {
        let pure = leads
            .iter()
            .any(|m| m.exponents().iter().enumerate().all(|(i, &e)| (i == v) == (e > 0)));
        if !pure {
            return None;
        }
    }
    let standard = |m: &Monomial| !leads.iter().any(|l| l.divides(m));
    let one = Monomial::one(nvars);
    if !standard(&one) {
        return Some(Vec::new());
    }
    let mut seen: BTreeSet<Monomial> = BTreeSet::new();
    let mut frontier = vec![one];
    while let Some(m) = frontier.pop() {
        if !seen.insert(m.clone()) {
            continue;
        }
        if seen.len() > limit {
            return None;
        }
        for v in 0..nvars {
            let next = m.mul(&Monomial::var(nvars, v));
            if standard(&next) && !seen.contains(&next) {
                frontier.push(next);
            }
        }
    }
    Some(seen.into_iter().collect())
}

/// Monic minimal polynomial (ascending coefficients) of the variable at
/// `var` modulo the ideal of a zero-dimensional basis.
pub fn minimal_polynomial(basis: &GroebnerBasis, var: usize, limit: usize) -> Result<Vec<Scalar>> {
    let std_monos = standard_monomials(basis, limit)
        .ok_or_else(|| Error::StrategyNotApplicable("ideal is not zero-dimensional".into()))?;
    if std_monos.is_empty() {
        return Ok(vec![Scalar::one()]);
    }
    let ring = basis.basis[0].ring().clone();
    let index: HashMap<&Monomial, usize> = std_monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let dim = std_monos.len();
    let tv = Monomial::var(ring.nvars(), var);

    // column i: normal form of t * std_monos[i]
    let mut columns: Vec<Vec<(usize, Scalar)>> = Vec::with_capacity(dim);
    for m in &std_monos {
        let tm = m.mul(&tv);
        let col = match index.get(&tm) {
            Some(&j) => vec![(j, Scalar::one())],
            None => {
                let nf = normal_form(
                    &Polynomial::from_terms(&ring, [(tm, Scalar::one())]),
                    &basis.basis,
                    basis.order,
                );
                nf.terms().map(|(mm, c)| (index[mm], c.clone())).collect()
            }
        };
        columns.push(col);
    }
    let apply = |v: &[Scalar]| -> Vec<Scalar> {
        let mut out = vec![Scalar::zero(); dim];
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, c) in &columns[i] {
                out[*j] += vi * c;
            }
        }
        out
    };

    // echelon rows: (vector, pivot, combination of powers of t)
    let mut rows: Vec<(Vec<Scalar>, usize, Vec<Scalar>)> = Vec::new();
    let one_idx = index[&Monomial::one(ring.nvars())];
    let mut power = vec![Scalar::zero(); dim];
    power[one_idx] = Scalar::one();
    for k in 0..=dim {
        let mut w = power.clone();
        let mut comb = vec![Scalar::zero(); k + 1];
        comb[k] = Scalar::one();
        for (r, p, c) in &rows {
            if w[*p].is_zero() {
                continue;
            }
            let f = &w[*p] / &r[*p];
            for (wi, ri) in w.iter_mut().zip(r) {
                if !ri.is_zero() {
                    *wi -= &f * ri;
                }
            }
            for (ci, cc) in comb.iter_mut().zip(c) {
                *ci -= &f * cc;
            }
        }
        match w.iter().position(|x| !x.is_zero()) {
            None => return Ok(comb),
            Some(p) => rows.push((w, p, comb)),
        }
        power = apply(&power);
    }
    unreachable!("the minimal polynomial has degree at most the quotient dimension")
}

/// Generator of `I ∩ Q[var]` through a degree-reverse-lexicographic basis and
/// the minimal polynomial of `var`; falls back to a block elimination order
/// when the ideal is not zero-dimensional.
pub fn univariate_eliminant(
    system: &PolySystem,
    var: &str,
    config: &GroebnerConfig,
) -> Result<(Polynomial, GroebnerStats)> {
    let ring = &system.ring;
    let v = ring.require(var)?;
    let elim: Vec<String> = ring.names().iter().filter(|n| *n != var).cloned().collect();
    let mut gens = system.generators.clone();
    let mut names = elim.clone();
    if config.pre_eliminate {
        let red = super::linear::substitute_unit_linear(&gens, &names)?;
        gens = red.generators;
        names = red.remaining;
    }
    gens.retain(|g| !g.is_zero());
    if gens.is_empty() {
        return Ok((Polynomial::zero(ring), GroebnerStats::default()));
    }
    let grevlex = PolySystem::new(ring, gens, MonomialOrder::DegRevLex)?;
    let gb = buchberger(&grevlex, config)?;
    if gb.is_unit() {
        return Ok((Polynomial::one(ring), gb.stats));
    }
    // variables that were substituted away no longer occur; drop them
    let used: Vec<usize> = (0..ring.nvars())
        .filter(|&i| i == v || names.iter().any(|n| ring.index_of(n) == Some(i)))
        .collect();
    let small = crate::algebra::Ring::new(used.iter().map(|&i| ring.names()[i].clone()));
    let moved = GroebnerBasis {
        basis: gb.basis.iter().map(|p| p.embed(&small)).collect::<Result<_>>()?,
        order: MonomialOrder::DegRevLex,
        reduced: true,
        stats: gb.stats.clone(),
    };
    let sv = small.require(var)?;
    match minimal_polynomial(&moved, sv, 1_000_000) {
        Ok(coeffs) => {
            let mono = |k: usize| {
                let mut e = vec![0u32; ring.nvars()];
                e[v] = k as u32;
                Monomial::from_exponents(e)
            };
            let p = Polynomial::from_terms(ring, coeffs.into_iter().enumerate().map(|(k, c)| (mono(k), c)));
            Ok((p.primitive().0, gb.stats))
        }
        Err(Error::StrategyNotApplicable(_)) => {
            let (polys, stats) = super::elimination_ideal_with_stats(system, &[var], config)?;
            let mut g: Option<crate::univar::UPoly> = None;
            for p in &polys {
                let u = crate::univar::UPoly::from_polynomial(p, v)?;
                g = Some(match g {
                    None => u.normalized(),
                    Some(acc) => acc.gcd(&u),
                });
            }
            match g {
                None => Ok((Polynomial::zero(ring), stats)),
                Some(u) => Ok((u.to_polynomial(ring, var)?, stats)),
            }
        }
        Err(e) => Err(e),
    }
}
