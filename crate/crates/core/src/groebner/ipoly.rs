//! Integer-coefficient working representation for Buchberger.
//!
//! Each monomial carries a precomputed comparison key so that order
//! comparisons are plain slice comparisons.

use std::cmp::Ordering;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::algebra::{Monomial, MonomialOrder, Polynomial, Ring, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Mono {
    pub exps: Box<[u32]>,
    key: Box<[u32]>,
    pub deg: u32,
}

pub(crate) fn order_key(order: MonomialOrder, exps: &[u32]) -> Box<[u32]> {
    fn revlex_block(out: &mut Vec<u32>, e: &[u32]) {
        out.push(e.iter().sum());
        out.extend(e.iter().rev().map(|x| u32::MAX - x));
    }
    match order {
        MonomialOrder::Lex => exps.into(),
        MonomialOrder::DegRevLex => {
            let mut v = Vec::with_capacity(exps.len() + 1);
            revlex_block(&mut v, exps);
            v.into_boxed_slice()
        }
        MonomialOrder::Block { split } => {
            let split = split.min(exps.len());
            let mut v = Vec::with_capacity(exps.len() + 2);
            revlex_block(&mut v, &exps[..split]);
            revlex_block(&mut v, &exps[split..]);
            v.into_boxed_slice()
        }
    }
}

impl Mono {
    pub fn new(order: MonomialOrder, exps: Box<[u32]>) -> Mono {
        let key = order_key(order, &exps);
        let deg = exps.iter().sum();
        Mono { exps, key, deg }
    }

    #[inline]
    pub fn cmp_order(&self, other: &Mono) -> Ordering {
        self.key.cmp(&other.key)
    }

    #[inline]
    pub fn divides(&self, other: &Mono) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    pub fn mul(&self, order: MonomialOrder, other: &Mono) -> Mono {
        Mono::new(
            order,
            self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a + b).collect(),
        )
    }

    pub fn div(&self, order: MonomialOrder, other: &Mono) -> Mono {
        Mono::new(
            order,
            self.exps.iter().zip(other.exps.iter()).map(|(a, b)| a - b).collect(),
        )
    }

    pub fn lcm(&self, order: MonomialOrder, other: &Mono) -> Mono {
        Mono::new(
            order,
            self.exps
                .iter()
                .zip(other.exps.iter())
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn coprime(&self, other: &Mono) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| *a == 0 || *b == 0)
    }
}

/// Polynomial with integer coefficients, terms sorted in descending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct IPoly {
    pub terms: Vec<(Mono, BigInt)>,
}

impl IPoly {
    pub fn from_poly(p: &Polynomial, order: MonomialOrder) -> IPoly {
        let (prim, _) = p.primitive();
        let mut terms: Vec<(Mono, BigInt)> = prim
            .terms()
            .map(|(m, c)| {
                debug_assert!(c.is_integer());
                (Mono::new(order, m.exponents().into()), c.numer().clone())
            })
            .collect();
        terms.sort_by(|a, b| b.0.cmp_order(&a.0));
        IPoly { terms }
    }

    pub fn to_poly(&self, ring: &Arc<Ring>) -> Polynomial {
        Polynomial::from_terms(
            ring,
            self.terms.iter().map(|(m, c)| {
                (
                    Monomial::from_exponents(m.exps.to_vec()),
                    Scalar::from_integer(c.clone()),
                )
            }),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &Mono {
        &self.terms[0].0
    }

    pub fn lc(&self) -> &BigInt {
        &self.terms[0].1
    }

    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Divide out the content; leading coefficient made positive.
    pub fn make_primitive(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let mut g = self.content();
        if self.lc().is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for (_, c) in &mut self.terms {
                *c /= &g;
            }
        }
    }

    /// `a*self - b*mono*other`, merging sorted term lists.
    pub fn scaled_sub(&self, a: &BigInt, b: &BigInt, mono: &Mono, other: &IPoly, order: MonomialOrder) -> IPoly {
        IPoly {
            terms: scaled_sub_terms(&self.terms, a, b, mono, other, order),
        }
    }
}

/// `a*terms - b*mono*other` for a descending term slice.
pub(crate) fn scaled_sub_terms(
    terms: &[(Mono, BigInt)],
    a: &BigInt,
    b: &BigInt,
    mono: &Mono,
    other: &IPoly,
    order: MonomialOrder,
) -> Vec<(Mono, BigInt)> {
    let mut out = Vec::with_capacity(terms.len() + other.terms.len());
    let mut i = 0;
    let mut shifted = other.terms.iter().map(|(m, c)| (m.mul(order, mono), c * b));
    let mut next_o = shifted.next();
    let a_one = a.is_one();
    let scaled = |c: &BigInt| if a_one { c.clone() } else { c * a };
    loop {
        match (terms.get(i), next_o.take()) {
            (Some((ms, cs)), Some((mo, co))) => match ms.cmp_order(&mo) {
                Ordering::Greater => {
                    out.push((ms.clone(), scaled(cs)));
                    i += 1;
                    next_o = Some((mo, co));
                }
                Ordering::Less => {
                    out.push((mo, -co));
                    next_o = shifted.next();
                }
                Ordering::Equal => {
                    let v = scaled(cs) - co;
                    if !v.is_zero() {
                        out.push((mo, v));
                    }
                    i += 1;
                    next_o = shifted.next();
                }
            },
            (Some((ms, cs)), None) => {
                out.push((ms.clone(), scaled(cs)));
                i += 1;
            }
            (None, Some((mo, co))) => {
                out.push((mo, -co));
                next_o = shifted.next();
            }
            (None, None) => break,
        }
    }
    out
}

/// Multipliers `(a, b)` with `a*x - b*y == 0` in lowest terms, `a > 0`.
pub(crate) fn cancel_pair(x_lead: &BigInt, y_lead: &BigInt) -> (BigInt, BigInt) {
    let g = x_lead.gcd(y_lead);
    let mut a = y_lead / &g;
    let mut b = x_lead / &g;
    if a.is_negative() {
        a = -a;
        b = -b;
    }
    (a, b)
}
