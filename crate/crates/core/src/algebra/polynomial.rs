use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::monomial::{Monomial, MonomialOrder};
use super::Scalar;
use crate::error::{Error, Result};

/// Ordered list of variable names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Vec<String>,
}

impl Ring {
    pub fn new<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Arc<Ring> {
        Arc::new(Ring {
            vars: vars.into_iter().map(Into::into).collect(),
        })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn names(&self) -> &[String] {
        &self.vars
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Exact multivariate polynomial over the rationals.
///
/// Terms live in a map keyed by [`Monomial`] (lexicographic storage order);
/// zero coefficients are never stored, so structural equality is equality of
/// polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    ring: Arc<Ring>,
    terms: BTreeMap<Monomial, Scalar>,
}

pub fn poly_arith(a: &Polynomial, b: &Polynomial, op: ArithOp) -> Result<Polynomial> {
    a.check_ring(b)?;
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    })
}

impl Polynomial {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring>, c: Scalar) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(ring.nvars()), c);
        }
        p
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, Scalar::one())
    }

    pub fn from_int(ring: &Arc<Ring>, c: i64) -> Self {
        Self::constant(ring, Scalar::from_integer(c.into()))
    }

    pub fn var(ring: &Arc<Ring>, name: &str) -> Result<Self> {
        let i = ring.require(name)?;
        Ok(Self::var_index(ring, i))
    }

    pub fn var_index(ring: &Arc<Ring>, index: usize) -> Self {
        let mut p = Self::zero(ring);
        p.terms.insert(Monomial::var(ring.nvars(), index), Scalar::one());
        p
    }

    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut p = Self::zero(ring);
        for (m, c) in terms {
            assert_eq!(m.nvars(), ring.nvars(), "monomial length must match ring");
            p.add_term(m, c);
        }
        p
    }

    pub fn parse(ring: &Arc<Ring>, text: &str) -> Result<Self> {
        super::parse::parse(ring, text)
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        if self.is_constant() {
            Some(self.terms.values().next().cloned().unwrap_or_else(Scalar::zero))
        } else {
            None
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.exponents()[var]).max().unwrap_or(0)
    }

    /// Total degree counted only over the variables in `vars`.
    pub fn degree_in_set(&self, vars: &[usize]) -> u32 {
        self.terms
            .keys()
            .map(|m| vars.iter().map(|&v| m.exponents()[v]).sum())
            .max()
            .unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.exponents()[var] > 0)
    }

    pub fn variables_used(&self) -> Vec<usize> {
        (0..self.ring.nvars()).filter(|&v| self.involves(v)).collect()
    }

    pub fn leading_term(&self, order: MonomialOrder) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(&Monomial, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp(b.0, a.0));
        v
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn check_ring(&self, other: &Polynomial) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::RingMismatch(format!(
                "[{}] vs [{}]",
                self.ring.names().join(","),
                other.ring.names().join(",")
            )))
        }
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Scalar) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(t, a)| (t.mul(m), a * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to the named variable.
    pub fn partial_derivative(&self, var: &str) -> Result<Polynomial> {
        let i = self.ring.require(var)?;
        Ok(self.derivative_index(i))
    }

    pub fn derivative_index(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.exponents()[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[i] -= 1;
            out.add_term(Monomial::from_exponents(exps), c * Scalar::from_integer(e.into()));
        }
        out
    }

    /// Exact evaluation at a rational point (one entry per ring variable).
    pub fn evaluate(&self, point: &[Scalar]) -> Result<Scalar> {
        if point.len() != self.ring.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.ring.nvars(),
                got: point.len(),
            });
        }
        let mut acc = Scalar::zero();
        let mut cache: HashMap<(usize, u32), Scalar> = HashMap::new();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    let pw = cache
                        .entry((v, e))
                        .or_insert_with(|| num_traits::pow(point[v].clone(), e as usize));
                    t *= &*pw;
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Floating evaluation, nested Horner over the lexicographic term order.
    pub fn evaluate_f64(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.ring.nvars() {
            return Err(Error::DimensionMismatch {
                expected: self.ring.nvars(),
                got: point.len(),
            });
        }
        let terms: Vec<(&[u32], f64)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.exponents(), scalar_to_f64(c)))
            .collect();
        Ok(horner(&terms, 0, point))
    }

    /// Substitute variables by polynomials living in `target`.
    ///
    /// Variables not in `map` pass through and must exist (by name) in
    /// `target`.
    pub fn substitute(&self, map: &HashMap<String, Polynomial>, target: &Arc<Ring>) -> Result<Polynomial> {
        for (name, img) in map {
            self.ring.require(name)?;
            if img.ring != *target {
                return Err(Error::RingMismatch(format!(
                    "image of `{name}` is not in the target ring"
                )));
            }
        }
        let n = self.ring.nvars();
        let mut images: Vec<Polynomial> = Vec::with_capacity(n);
        for (i, name) in self.ring.names().iter().enumerate() {
            match map.get(name) {
                Some(p) => images.push(p.clone()),
                None => {
                    if self.involves(i) {
                        images.push(Polynomial::var(target, name)?);
                    } else {
                        images.push(Polynomial::zero(target));
                    }
                }
            }
        }
        let mut powers: Vec<Vec<Polynomial>> = vec![Vec::new(); n];
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut powers[v];
                if cache.is_empty() {
                    cache.push(Polynomial::one(target));
                }
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap() * &images[v];
                    cache.push(next);
                }
                t = &t * &cache[e as usize];
                if t.is_zero() {
                    break;
                }
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Substitute scalars for some variables, landing in `target`.
    pub fn substitute_values(&self, values: &HashMap<String, Scalar>, target: &Arc<Ring>) -> Result<Polynomial> {
        let map = values
            .iter()
            .map(|(k, v)| (k.clone(), Polynomial::constant(target, v.clone())))
            .collect();
        self.substitute(&map, target)
    }

    /// Rename variables; the image ring must contain every renamed or
    /// passed-through variable that actually occurs.
    pub fn rename(&self, names: &HashMap<String, String>, target: &Arc<Ring>) -> Result<Polynomial> {
        let mut idx = Vec::with_capacity(self.ring.nvars());
        for (i, name) in self.ring.names().iter().enumerate() {
            let new = names.get(name).unwrap_or(name);
            match target.index_of(new) {
                Some(j) => idx.push(Some(j)),
                None if !self.involves(i) => idx.push(None),
                None => return Err(Error::UnknownVariable(new.clone())),
            }
        }
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.nvars()];
            for (i, &x) in m.exponents().iter().enumerate() {
                if x > 0 {
                    e[idx[i].unwrap()] += x;
                }
            }
            out.add_term(Monomial::from_exponents(e), c.clone());
        }
        Ok(out)
    }

    /// Re-express in another ring sharing the variable names that occur.
    pub fn embed(&self, target: &Arc<Ring>) -> Result<Polynomial> {
        self.rename(&HashMap::new(), target)
    }

    /// Multiply by the positive rational that makes all coefficients coprime
    /// integers. Returns the scaled polynomial and the multiplier.
    pub fn primitive(&self) -> (Polynomial, Scalar) {
        if self.is_zero() {
            return (self.clone(), Scalar::one());
        }
        let mut den_lcm = BigInt::one();
        let mut num_gcd = BigInt::zero();
        for c in self.terms.values() {
            den_lcm = den_lcm.lcm(c.denom());
            num_gcd = num_gcd.gcd(c.numer());
        }
        let factor = Scalar::new(den_lcm, num_gcd);
        (self.scale(&factor), factor)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Monic normalization under `order` (leading coefficient 1).
    pub fn monic(&self, order: MonomialOrder) -> Polynomial {
        match self.leading_term(order) {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    /// Canonical text: terms in descending lexicographic order, `*` explicit.
    pub fn to_text(&self) -> String {
        self.to_text_ordered(MonomialOrder::Lex)
    }

    pub fn to_text_ordered(&self, order: MonomialOrder) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.sorted_terms(order).into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = format_monomial(&self.ring, m);
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&abs.to_string());
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

fn format_monomial(ring: &Ring, m: &Monomial) -> String {
    // factors are written in byte order of their names
    let mut factors: Vec<(&str, u32)> = m
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| (ring.names()[i].as_str(), e))
        .collect();
    factors.sort_unstable();
    let parts: Vec<String> = factors
        .into_iter()
        .map(|(n, e)| if e == 1 { n.to_string() } else { format!("{n}^{e}") })
        .collect();
    parts.join("*")
}

fn horner(terms: &[(&[u32], f64)], var: usize, point: &[f64]) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    if var == point.len() {
        return terms.iter().map(|t| t.1).sum();
    }
    // terms are sorted ascending in lex, so exponents of `var` are ascending
    let mut acc = 0.0;
    let mut start = terms.len();
    let mut prev_e: Option<u32> = None;
    let x = point[var];
    while start > 0 {
        let e = terms[start - 1].0[var];
        let mut lo = start - 1;
        while lo > 0 && terms[lo - 1].0[var] == e {
            lo -= 1;
        }
        let inner = horner(&terms[lo..start], var + 1, point);
        acc = match prev_e {
            None => inner,
            Some(pe) => acc * x.powi((pe - e) as i32) + inner,
        };
        prev_e = Some(e);
        start = lo;
    }
    acc * x.powi(prev_e.unwrap_or(0) as i32)
}

pub fn scalar_to_f64(c: &Scalar) -> f64 {
    match (c.numer().to_f64(), c.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // scale both down to avoid overflow
            let shift = c.numer().bits().max(c.denom().bits()).saturating_sub(1000);
            let n = (c.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (c.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.ring, rhs.ring, "ring mismatch in add");
        let (mut big, small) = if self.len() >= rhs.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.ring, rhs.ring, "ring mismatch in sub");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        assert_eq!(self.ring, rhs.ring, "ring mismatch in mul");
        let mut out = Polynomial::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl std::ops::$tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                std::ops::$tr::$f(&self, &rhs)
            }
        }
        impl std::ops::$tr<&Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: &Polynomial) -> Polynomial {
                std::ops::$tr::$f(&self, rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
