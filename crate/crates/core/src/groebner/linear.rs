//! Elimination for systems that are linear in the eliminated unknowns.
//!
//! Rows are kept over `Z[T]` and updated without division, so every row
//! stays in the ideal. Only constant pivots are exact; a non-constant pivot
//! can add spurious roots, which the caller detects through `pivots`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Monomial, Polynomial, Scalar};
use crate::error::{Error, Result};
use crate::univar::UPoly;

/// Outcome of fraction-free linear elimination.
#[derive(Clone, Debug)]
pub struct LinearElimination {
    /// Univariate polynomials in the kept variable left after elimination.
    pub leftovers: Vec<UPoly>,
    /// Greatest common divisor of `leftovers` (zero when none remain).
    pub eliminant: UPoly,
    /// Non-constant pivots used; roots of these may be spurious.
    pub pivots: Vec<UPoly>,
}

/// Split `p` as `sum coeff_j(T) * u_j + rest(T)`; `None` if `p` is not
/// affine in the unknowns or involves anything besides `keep`.
fn affine_row(p: &Polynomial, unknowns: &[usize], keep: usize) -> Option<Vec<Vec<(u32, BigInt)>>> {
    let mut row: Vec<Vec<(u32, BigInt)>> = vec![Vec::new(); unknowns.len() + 1];
    let (prim, _) = p.primitive();
    for (m, c) in prim.terms() {
        let e = m.exponents();
        let mut slot = unknowns.len();
        for (i, &x) in e.iter().enumerate() {
            if x == 0 || i == keep {
                continue;
            }
            let j = unknowns.iter().position(|&u| u == i)?;
            if x != 1 || slot != unknowns.len() {
                return None;
            }
            slot = j;
        }
        row[slot].push((e[keep], c.numer().clone()));
    }
    Some(row)
}

fn to_upoly(terms: &[(u32, BigInt)]) -> UPoly {
    let deg = terms.iter().map(|t| t.0).max().unwrap_or(0) as usize;
    let mut c = vec![BigInt::zero(); deg + 1];
    for (e, k) in terms {
        c[*e as usize] += k;
    }
    UPoly::new(c)
}

fn row_content(row: &[UPoly]) -> BigInt {
    let mut g = BigInt::zero();
    for e in row {
        for c in e.coeffs() {
            g = g.gcd(c);
            if g.is_one() {
                return g;
            }
        }
    }
    g
}

/// Eliminate `unknowns` from `gens`, which must be affine in them with
/// coefficients in `Q[keep]`.
pub fn linear_eliminate(gens: &[Polynomial], unknowns: &[&str], keep: &str) -> Result<LinearElimination> {
    let ring = gens
        .first()
        .map(|g| g.ring().clone())
        .ok_or_else(|| Error::Invalid("empty generator list".into()))?;
    let keep_idx = ring.require(keep)?;
    let unk: Vec<usize> = unknowns.iter().map(|u| ring.require(u)).collect::<Result<_>>()?;
    let mut rows: Vec<Vec<UPoly>> = Vec::with_capacity(gens.len());
    for g in gens {
        let r = affine_row(g, &unk, keep_idx)
            .ok_or_else(|| Error::StrategyNotApplicable(format!("`{g}` is not affine in the unknowns")))?;
        rows.push(r.iter().map(|t| to_upoly(t)).collect());
    }

    let ncols = unk.len();
    let mut pivots = Vec::new();
    let mut used = vec![false; rows.len()];
    for _ in 0..ncols {
        // prefer constant pivots of small magnitude, then low degree
        let mut best: Option<(usize, usize, (usize, BigInt))> = None;
        for (i, row) in rows.iter().enumerate() {
            if used[i] {
                continue;
            }
            for (j, e) in row[..ncols].iter().enumerate() {
                if e.is_zero() {
                    continue;
                }
                let key = (e.degree(), e.lc().abs());
                if best.as_ref().is_none_or(|b| key < b.2) {
                    best = Some((i, j, key));
                }
            }
        }
        let Some((pi, pj, _)) = best else { break };
        used[pi] = true;
        let pivot_row = rows[pi].clone();
        let p = pivot_row[pj].clone();
        if !p.is_constant() {
            pivots.push(p.clone());
        }
        for (i, row) in rows.iter_mut().enumerate() {
            if i == pi || row[pj].is_zero() {
                continue;
            }
            let e = row[pj].clone();
            for (k, entry) in row.iter_mut().enumerate() {
                *entry = entry.mul(&p).sub(&pivot_row[k].mul(&e));
            }
            let c = row_content(row);
            if !c.is_zero() && !c.is_one() {
                for entry in row.iter_mut() {
                    *entry = UPoly::new(entry.coeffs().iter().map(|x| x / &c).collect());
                }
            }
        }
    }

    let leftovers: Vec<UPoly> = rows
        .iter()
        .enumerate()
        .filter(|(i, r)| !used[*i] && r[..ncols].iter().all(|e| e.is_zero()))
        .map(|(_, r)| r[ncols].clone())
        .filter(|e| !e.is_zero())
        .collect();
    let mut eliminant = UPoly::zero();
    for l in &leftovers {
        eliminant = if eliminant.is_zero() {
            l.normalized()
        } else {
            eliminant.gcd(l)
        };
    }
    Ok(LinearElimination {
        leftovers,
        eliminant,
        pivots,
    })
}

/// Result of [`substitute_unit_linear`].
#[derive(Clone, Debug)]
pub struct UnitLinearReduction {
    pub generators: Vec<Polynomial>,
    /// Eliminated variables that could not be solved for.
    pub remaining: Vec<String>,
    /// `(v, image)` in solving order; an image only involves variables
    /// solved later or left in `remaining`.
    pub solved: Vec<(String, Polynomial)>,
}

impl UnitLinearReduction {
    /// Values of the solved variables given values for everything else,
    /// indexed like the ring.
    pub fn back_substitute(&self, point: &mut [f64]) -> Result<()> {
        for (v, image) in self.solved.iter().rev() {
            let i = image.ring().require(v)?;
            point[i] = image.evaluate_f64(point)?;
        }
        Ok(())
    }
}

/// Repeatedly solve generators of the form `c*v + r` (constant `c`, `r` free
/// of `v`) for an eliminated variable `v` and substitute it everywhere.
///
/// The quotient ring is unchanged, so the elimination ideal is too.
pub fn substitute_unit_linear(gens: &[Polynomial], eliminate: &[String]) -> Result<UnitLinearReduction> {
    let mut gens: Vec<Polynomial> = gens.to_vec();
    let mut remaining: Vec<String> = eliminate.to_vec();
    let mut solved = Vec::new();
    let Some(ring) = gens.first().map(|g| g.ring().clone()) else {
        return Ok(UnitLinearReduction {
            generators: gens,
            remaining,
            solved,
        });
    };
    loop {
        let mut choice: Option<(usize, usize, usize)> = None;
        for (gi, g) in gens.iter().enumerate() {
            for (vi, name) in remaining.iter().enumerate() {
                let v = ring.require(name)?;
                if unit_coefficient(g, v).is_some() {
                    let cost = g.len();
                    if choice.is_none_or(|(_, _, best)| cost < best) {
                        choice = Some((gi, vi, cost));
                    }
                }
            }
        }
        let Some((gi, vi, _)) = choice else { break };
        let g = gens.remove(gi);
        let name = remaining.remove(vi);
        let v = ring.require(&name)?;
        let c = unit_coefficient(&g, v).unwrap();
        // v = -(g - c*v)/c
        let cv = Polynomial::var_index(&ring, v).scale(&c);
        let image = (&g - &cv).scale(&-c.recip());
        let map: HashMap<String, Polynomial> = [(name.clone(), image.clone())].into_iter().collect();
        gens = gens
            .iter()
            .map(|p| p.substitute(&map, &ring))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter(|p| !p.is_zero())
            .map(|p| p.primitive().0)
            .collect();
        solved.push((name, image));
    }
    Ok(UnitLinearReduction {
        generators: gens,
        remaining,
        solved,
    })
}

fn unit_coefficient(g: &Polynomial, v: usize) -> Option<Scalar> {
    if g.degree_in(v) != 1 {
        return None;
    }
    let mut coeff: Option<Scalar> = None;
    let mut unit = Monomial::one(g.ring().nvars()).exponents().to_vec();
    unit[v] = 1;
    let unit = Monomial::from_exponents(unit);
    for (m, c) in g.terms() {
        if m.exponents()[v] == 1 {
            if *m != unit {
                return None;
            }
            coeff = Some(c.clone());
        }
    }
    coeff
}
