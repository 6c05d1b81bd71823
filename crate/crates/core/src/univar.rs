//! Exact real-root isolation for the univariate period polynomial.
//!
//! Roots are counted with Sturm sequences built from integer pseudo-remainders
//! and refined by exact bisection, so every reported interval is a proof that
//! it holds exactly one root.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{scalar_to_f64, Polynomial, Ring, Scalar};
use crate::error::{Error, Result};

/// Dense univariate polynomial with integer coefficients, ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UPoly {
    coeffs: Vec<BigInt>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> UPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> UPoly {
        UPoly::new(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero() -> UPoly {
        UPoly { coeffs: vec![] }
    }

    pub fn one() -> UPoly {
        UPoly::from_i64(&[1])
    }

    /// Monomial `x^k`.
    pub fn x_pow(k: usize) -> UPoly {
        let mut c = vec![BigInt::zero(); k + 1];
        c[k] = BigInt::one();
        UPoly { coeffs: c }
    }

    /// Integer-scaled (primitive) image of a polynomial in a single variable.
    pub fn from_polynomial(p: &Polynomial, var: usize) -> Result<UPoly> {
        if p.variables_used().iter().any(|&v| v != var) {
            return Err(Error::Invalid(format!("polynomial `{p}` is not univariate")));
        }
        let (prim, _) = p.primitive();
        let deg = prim.degree_in(var) as usize;
        let mut c = vec![BigInt::zero(); deg + 1];
        for (m, k) in prim.terms() {
            c[m.exponents()[var] as usize] = k.numer().clone();
        }
        Ok(UPoly::new(c))
    }

    pub fn to_polynomial(&self, ring: &std::sync::Arc<Ring>, var: &str) -> Result<Polynomial> {
        let v = Polynomial::var(ring, var)?;
        let mut out = Polynomial::zero(ring);
        let mut pw = Polynomial::one(ring);
        for c in &self.coeffs {
            if !c.is_zero() {
                out = &out + &pw.scale(&Scalar::from_integer(c.clone()));
            }
            pw = &pw * &v;
        }
        Ok(out)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lc(&self) -> &BigInt {
        self.coeffs.last().expect("zero polynomial has no leading coefficient")
    }

    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide by the positive content (keeps every sign).
    pub fn primitive(&self) -> UPoly {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        UPoly::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Primitive with positive leading coefficient.
    pub fn normalized(&self) -> UPoly {
        let p = self.primitive();
        if !p.is_zero() && p.lc().is_negative() {
            -&p
        } else {
            p
        }
    }

    pub fn derivative(&self) -> UPoly {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Scalar) -> Scalar {
        // Horner over the fraction: sum c_i n^i d^(deg-i), divided by d^deg.
        if self.coeffs.is_empty() {
            return Scalar::zero();
        }
        let n = x.numer();
        let d = x.denom();
        let deg = self.degree();
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c * &dpow;
            dpow *= d;
        }
        let den = num_traits::pow(d.clone(), deg);
        Scalar::new(acc, den)
    }

    /// Sign of the value at `x`, without forming the reduced fraction.
    pub fn sign_at(&self, x: &Scalar) -> i32 {
        if self.coeffs.is_empty() {
            return 0;
        }
        let n = x.numer();
        let d = x.denom();
        let mut acc = BigInt::zero();
        let mut dpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c * &dpow;
            dpow *= d;
        }
        sign_of(&acc)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        if self.coeffs.len().min(other.coeffs.len()) >= 16 {
            return UPoly::new(crate::modular::kronecker_mul(&self.coeffs, &other.coeffs));
        }
        let mut c = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        UPoly::new(c)
    }

    /// `x^k * self`.
    pub fn shift(&self, k: usize) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut c = vec![BigInt::zero(); k];
        c.extend(self.coeffs.iter().cloned());
        UPoly { coeffs: c }
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).cloned().unwrap_or_default() + other.coeffs.get(i).cloned().unwrap_or_default()
                })
                .collect(),
        )
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        self.add(&-other)
    }

    pub fn scale(&self, k: &BigInt) -> UPoly {
        UPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    pub fn pow(&self, e: u32) -> UPoly {
        let mut acc = UPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Pseudo-remainder `lc(b)^(deg a - deg b + 1) * a mod b`.
    pub fn prem(&self, b: &UPoly) -> UPoly {
        assert!(!b.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let db = b.degree();
        let lb = b.lc().clone();
        if r.len() < b.coeffs.len() {
            return self.clone();
        }
        let mut steps = r.len() - b.coeffs.len() + 1;
        while r.len() >= b.coeffs.len() && !r.is_empty() {
            let lr = r.last().unwrap().clone();
            let shift = r.len() - 1 - db;
            for c in r.iter_mut() {
                *c *= &lb;
            }
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[i + shift] -= &lr * bc;
            }
            debug_assert!(r.last().unwrap().is_zero());
            r.pop();
            while r.last().is_some_and(Zero::is_zero) {
                r.pop();
            }
            steps -= 1;
        }
        // complete the multiplier when degrees dropped by more than one per step
        if steps > 0 {
            let k = num_traits::pow(lb, steps);
            for c in r.iter_mut() {
                *c *= &k;
            }
        }
        UPoly::new(r)
    }

    /// Exact division `self / b` when `b` divides `self` over the integers.
    pub fn exact_div(&self, b: &UPoly) -> Option<UPoly> {
        if b.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(UPoly::zero());
        }
        if self.degree() < b.degree() {
            return None;
        }
        let mut r = self.coeffs.clone();
        let db = b.degree();
        let mut q = vec![BigInt::zero(); self.degree() - db + 1];
        for k in (0..q.len()).rev() {
            let top = &r[k + db];
            let (qq, rem) = top.div_rem(b.lc());
            if !rem.is_zero() {
                return None;
            }
            for (i, bc) in b.coeffs.iter().enumerate() {
                r[k + i] -= &qq * bc;
            }
            q[k] = qq;
        }
        if r.iter().all(Zero::is_zero) {
            Some(UPoly::new(q))
        } else {
            None
        }
    }

    /// Greatest common divisor up to an integer unit: primitive, positive
    /// leading coefficient.
    pub fn gcd(&self, other: &UPoly) -> UPoly {
        if !self.is_zero() && !other.is_zero() {
            let (a, b) = (self.normalized(), other.normalized());
            let g = crate::modular::gcd(&a.coeffs, &b.coeffs, |h| {
                let h = UPoly::new(h.to_vec());
                a.exact_div(&h).is_some() && b.exact_div(&h).is_some()
            });
            return UPoly::new(g);
        }
        let (mut a, mut b) = if self.degree() >= other.degree() {
            (self.normalized(), other.normalized())
        } else {
            (other.normalized(), self.normalized())
        };
        if b.is_zero() {
            return a;
        }
        while !b.is_zero() {
            let r = a.prem(&b).normalized();
            a = b;
            b = r;
        }
        if a.is_constant() {
            return UPoly::one();
        }
        a
    }

    /// `self / gcd(self, self')`.
    pub fn squarefree_part(&self) -> UPoly {
        let g = self.gcd(&self.derivative());
        if g.is_constant() {
            return self.normalized();
        }
        self.normalized()
            .exact_div(&g.normalized())
            .map(|q| q.normalized())
            .unwrap_or_else(|| self.normalized())
    }

    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(Zero::is_zero)
    }

    /// `q(S)` with `q(T^2) = self(T)`; only valid when `self` is even.
    pub fn even_part_in_square(&self) -> UPoly {
        UPoly::new(self.coeffs.iter().step_by(2).cloned().collect())
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> UPoly {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// Upper bound (Cauchy) on the absolute value of every root.
    pub fn root_bound(&self) -> Scalar {
        let lc = self.lc().abs();
        let m = self
            .coeffs
            .iter()
            .take(self.coeffs.len().saturating_sub(1))
            .map(|c| c.abs())
            .max()
            .unwrap_or_default();
        Scalar::new(m, lc).ceil() + Scalar::one()
    }
}

impl std::ops::Neg for &UPoly {
    type Output = UPoly;
    fn neg(self) -> UPoly {
        UPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = Ring::new(["T"]);
        write!(f, "{}", self.to_polynomial(&r, "T").map_err(|_| fmt::Error)?)
    }
}

fn sign_of(x: &BigInt) -> i32 {
    match x.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Interval endpoint for Sturm counting.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    NegInf,
    Finite(Scalar),
    PosInf,
}

/// Sturm sequence `p, p', -rem, ...` with positive rescaling only.
#[derive(Clone, Debug)]
pub struct SturmSequence {
    seq: Vec<UPoly>,
}

impl SturmSequence {
    pub fn new(p: &UPoly) -> SturmSequence {
        assert!(!p.is_zero(), "Sturm sequence of the zero polynomial");
        let mut seq = vec![p.primitive()];
        let d = p.derivative().primitive();
        if d.is_zero() {
            return SturmSequence { seq };
        }
        seq.push(d);
        loop {
            let n = seq.len();
            let b = &seq[n - 1];
            if b.is_constant() {
                break;
            }
            let mut r = seq[n - 2].prem(b);
            // prem multiplies by lc(b)^k; undo any sign it introduced
            let k = seq[n - 2].degree() - b.degree() + 1;
            if b.lc().is_negative() && k % 2 == 1 {
                r = -&r;
            }
            if r.is_zero() {
                break;
            }
            seq.push((-&r).primitive());
        }
        SturmSequence { seq }
    }

    fn sign_at(&self, p: &UPoly, x: &Bound) -> i32 {
        match x {
            Bound::Finite(v) => p.sign_at(v),
            Bound::PosInf => sign_of(p.lc()),
            Bound::NegInf => {
                let s = sign_of(p.lc());
                if p.degree().is_multiple_of(2) {
                    s
                } else {
                    -s
                }
            }
        }
    }

    pub fn variations(&self, x: &Bound) -> usize {
        let mut last = 0;
        let mut count = 0;
        for p in &self.seq {
            let s = self.sign_at(p, x);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Distinct real roots in `(a, b]`.
    pub fn count(&self, a: &Bound, b: &Bound) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// Number of distinct real roots of `p` in `(a, b]`.
pub fn sturm_count(p: &UPoly, a: &Bound, b: &Bound) -> usize {
    SturmSequence::new(p).count(a, b)
}

/// Period polynomial after removal of the trivial root `T = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Eliminant {
    pub poly: UPoly,
    /// Multiplicity of `T = 0` that was divided out.
    pub deflation: usize,
    /// True when `poly` is even in `T`; isolation then runs in `S = T^2`.
    pub even_substitution: bool,
}

pub fn deflate(p: &UPoly) -> Eliminant {
    assert!(!p.is_zero(), "cannot deflate the zero polynomial");
    let m = p.coeffs.iter().take_while(|c| c.is_zero()).count();
    let poly = UPoly::new(p.coeffs[m..].to_vec()).normalized();
    let even_substitution = poly.degree() > 0 && poly.is_even();
    Eliminant {
        poly,
        deflation: m,
        even_substitution,
    }
}

/// An isolated positive root of the eliminant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodCertificate {
    #[serde(with = "scalar_text")]
    pub lo: Scalar,
    #[serde(with = "scalar_text")]
    pub hi: Scalar,
    pub value: f64,
    pub sturm_count: usize,
    pub multiplicity: usize,
}

impl PeriodCertificate {
    pub fn contains(&self, t: f64) -> bool {
        scalar_to_f64(&self.lo) <= t && t <= scalar_to_f64(&self.hi)
    }

    pub fn width(&self) -> Scalar {
        &self.hi - &self.lo
    }
}

pub(crate) mod scalar_text {
    use super::Scalar;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Scalar, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        crate::algebra::parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

/// Relative width target for refined certificates.
pub fn width_tolerance() -> Scalar {
    Scalar::new(BigInt::one(), BigInt::from(10u64).pow(12))
}

/// Every positive real root of the eliminant, isolated and refined.
pub fn isolate_positive_roots(e: &Eliminant) -> Vec<PeriodCertificate> {
    if e.poly.is_constant() {
        return Vec::new();
    }
    let p = &e.poly;
    let sturm_t = SturmSequence::new(p);
    let zero = Bound::Finite(Scalar::zero());
    let total = sturm_t.count(&zero, &Bound::PosInf);
    if total == 0 {
        return Vec::new();
    }

    let intervals: Vec<(Scalar, Scalar)> = if e.even_substitution {
        let q = p.even_part_in_square();
        let sturm_s = SturmSequence::new(&q);
        let s_intervals = isolate(&q, &sturm_s, Scalar::zero(), q.root_bound());
        s_intervals
            .into_iter()
            .map(|(lo, hi)| sqrt_interval(p, &sturm_t, &q, &sturm_s, lo, hi))
            .collect()
    } else {
        isolate(p, &sturm_t, Scalar::zero(), p.root_bound())
    };
    debug_assert_eq!(intervals.len(), total);

    let sqf = p.squarefree_part();
    let derivs = multiplicity_chain(p);
    intervals
        .into_iter()
        .map(|(lo, hi)| {
            let (lo, hi) = refine(&sqf, lo, hi);
            let multiplicity = derivs
                .iter()
                .take_while(|s| s.count(&Bound::Finite(lo.clone()), &Bound::Finite(hi.clone())) == 1)
                .count();
            let mid = (&lo + &hi) / Scalar::from_integer(2.into());
            PeriodCertificate {
                value: scalar_to_f64(&mid),
                lo,
                hi,
                sturm_count: 1,
                multiplicity: multiplicity.max(1),
            }
        })
        .collect()
}

fn multiplicity_chain(p: &UPoly) -> Vec<SturmSequence> {
    let mut out = vec![SturmSequence::new(p)];
    let mut q = p.clone();
    loop {
        let g = q.gcd(&q.derivative());
        if g.is_constant() {
            break;
        }
        out.push(SturmSequence::new(&g));
        q = g;
    }
    out
}

fn split_point(p: &UPoly, lo: &Scalar, hi: &Scalar) -> Scalar {
    let two = Scalar::from_integer(2.into());
    let mut mid = (lo + hi) / &two;
    let mut k = 3i64;
    while p.sign_at(&mid) == 0 {
        // move off an exact root
        mid = lo + (hi - lo) * Scalar::new(BigInt::from(k - 1), BigInt::from(2 * k));
        k += 1;
    }
    mid
}

/// Bisect `(lo, hi]` until every piece holds at most one root.
fn isolate(p: &UPoly, sturm: &SturmSequence, lo: Scalar, hi: Scalar) -> Vec<(Scalar, Scalar)> {
    let mut out = Vec::new();
    let mut stack = vec![(lo, hi)];
    while let Some((a, b)) = stack.pop() {
        let c = sturm.count(&Bound::Finite(a.clone()), &Bound::Finite(b.clone()));
        match c {
            0 => {}
            1 => out.push((a, b)),
            _ => {
                let m = split_point(p, &a, &b);
                stack.push((m.clone(), b));
                stack.push((a, m));
            }
        }
    }
    out.sort_by(|x, y| x.0.cmp(&y.0));
    out
}

/// Rational bounds `lo <= sqrt(x) <= hi` with `hi - lo` about `2^-bits`.
fn sqrt_bounds(x: &Scalar, bits: u64) -> (Scalar, Scalar) {
    let n = x.numer();
    let d = x.denom();
    let scale = BigInt::one() << (2 * bits);
    let v = n * d * &scale;
    let s = v.sqrt();
    let den = d * (BigInt::one() << bits);
    let lo = Scalar::new(s.clone(), den.clone());
    let hi = if &s * &s == v {
        lo.clone()
    } else {
        Scalar::new(s + 1, den)
    };
    (lo, hi)
}

fn sqrt_interval(
    p: &UPoly,
    sturm_t: &SturmSequence,
    q: &UPoly,
    sturm_s: &SturmSequence,
    mut lo: Scalar,
    mut hi: Scalar,
) -> (Scalar, Scalar) {
    let mut bits = 64;
    loop {
        let (a, _) = sqrt_bounds(&lo, bits);
        let (_, b) = sqrt_bounds(&hi, bits);
        let ok = p.sign_at(&a) != 0
            && p.sign_at(&b) != 0
            && sturm_t.count(&Bound::Finite(a.clone()), &Bound::Finite(b.clone())) == 1;
        if ok {
            return (a, b);
        }
        // tighten in S and retry with more precision
        let m = split_point(q, &lo, &hi);
        if sturm_s.count(&Bound::Finite(lo.clone()), &Bound::Finite(m.clone())) == 1 {
            hi = m;
        } else {
            lo = m;
        }
        bits += 16;
    }
}

/// Bisect a one-root interval of a square-free polynomial down to the
/// relative width target.
fn refine(sqf: &UPoly, mut lo: Scalar, mut hi: Scalar) -> (Scalar, Scalar) {
    let tol = width_tolerance();
    let one = Scalar::one();
    let mut s_lo = sqf.sign_at(&lo);
    let s_hi = sqf.sign_at(&hi);
    if s_lo == 0 || s_hi == 0 || s_lo == s_hi {
        // the root may sit on an endpoint; isolate a strictly interior bracket
        let sturm = SturmSequence::new(sqf);
        loop {
            let target = &tol * hi.clone().max(one.clone());
            if &hi - &lo <= target {
                return (lo, hi);
            }
            let m = split_point(sqf, &lo, &hi);
            if sturm.count(&Bound::Finite(lo.clone()), &Bound::Finite(m.clone())) == 1 {
                hi = m;
            } else {
                lo = m;
            }
        }
    }
    let two = Scalar::from_integer(2.into());
    loop {
        let target = &tol * hi.clone().max(one.clone());
        if &hi - &lo <= target {
            return (lo, hi);
        }
        let m = (&lo + &hi) / &two;
        let s = sqf.sign_at(&m);
        if s == 0 {
            // exact rational root: shrink to a tiny bracket around it
            let eps = &target / Scalar::from_integer(4.into());
            return (&m - &eps, &m + &eps);
        }
        if s == s_lo {
            lo = m;
            s_lo = s;
        } else {
            hi = m;
        }
    }
}

/// Float interval convenience used by callers that want `(value, lo, hi)`.
pub fn certificate_bounds(c: &PeriodCertificate) -> (f64, f64, f64) {
    (c.value, scalar_to_f64(&c.lo), scalar_to_f64(&c.hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::new(n.into(), d.into())
    }

    fn fin(n: i64) -> Bound {
        Bound::Finite(q(n, 1))
    }

    #[test]
    fn sturm_basic_counts() {
        let t2p1 = UPoly::from_i64(&[1, 0, 1]);
        assert_eq!(sturm_count(&t2p1, &Bound::NegInf, &Bound::PosInf), 0);
        let t2m4 = UPoly::from_i64(&[-4, 0, 1]);
        assert_eq!(sturm_count(&t2m4, &fin(0), &Bound::PosInf), 1);
        assert_eq!(sturm_count(&t2m4, &Bound::NegInf, &Bound::PosInf), 2);
        // half-open: (-2, 2] contains 2 only
        assert_eq!(sturm_count(&t2m4, &fin(-2), &fin(2)), 1);
    }

    #[test]
    fn sturm_counts_distinct_roots() {
        // (T-1)^2 (T-3)
        let p = UPoly::from_i64(&[-1, 1]).pow(2).mul(&UPoly::from_i64(&[-3, 1]));
        assert_eq!(sturm_count(&p, &Bound::NegInf, &Bound::PosInf), 2);
    }

    #[test]
    fn deflation_examples() {
        let e = deflate(&UPoly::from_i64(&[0, -4, 0, 1]));
        assert_eq!(e.poly, UPoly::from_i64(&[-4, 0, 1]));
        assert_eq!(e.deflation, 1);
        assert!(e.even_substitution);

        let e = deflate(&UPoly::from_i64(&[0, 0, 0, 0, 1]));
        assert_eq!(e.poly, UPoly::one());
        assert_eq!(e.deflation, 4);
        assert!(isolate_positive_roots(&e).is_empty());
    }

    #[test]
    fn isolate_t2_minus_4() {
        let e = deflate(&UPoly::from_i64(&[-4, 0, 1]));
        let c = isolate_positive_roots(&e);
        assert_eq!(c.len(), 1);
        assert!((c[0].value - 2.0).abs() < 1e-12);
        assert!(c[0].lo < q(2, 1) && q(2, 1) < c[0].hi || c[0].contains(2.0));
    }

    #[test]
    fn multiplicity_is_reported() {
        let p = UPoly::from_i64(&[-1, 1]).pow(3).mul(&UPoly::from_i64(&[-5, 1]));
        let c = isolate_positive_roots(&deflate(&p));
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].multiplicity, 3);
        assert_eq!(c[1].multiplicity, 1);
    }

    #[test]
    fn prem_and_gcd() {
        let a = UPoly::from_i64(&[-1, 1]).mul(&UPoly::from_i64(&[2, 3]));
        let b = UPoly::from_i64(&[-1, 1]).mul(&UPoly::from_i64(&[5, 0, 1]));
        assert_eq!(a.gcd(&b), UPoly::from_i64(&[-1, 1]));
        let q = b.exact_div(&UPoly::from_i64(&[-1, 1])).unwrap();
        assert_eq!(q, UPoly::from_i64(&[5, 0, 1]));
        assert!(b.exact_div(&UPoly::from_i64(&[2, 3])).is_none());
    }

    #[test]
    fn eval_matches_rational_horner() {
        let p = UPoly::from_i64(&[3, -2, 0, 5]);
        let x = q(-7, 3);
        let direct = q(3, 1) - q(2, 1) * &x + q(5, 1) * &x * &x * &x;
        assert_eq!(p.eval(&x), direct);
        assert_eq!(p.sign_at(&x), if direct > q(0, 1) { 1 } else { -1 });
    }

    #[test]
    fn width_invariant_holds() {
        // roots 1/3 and 250
        let p = UPoly::from_i64(&[-1, 3]).mul(&UPoly::from_i64(&[-250, 1]));
        for c in isolate_positive_roots(&deflate(&p)) {
            let scale = c.hi.clone().max(Scalar::one());
            assert!(c.width() <= width_tolerance() * scale);
        }
    }
}
