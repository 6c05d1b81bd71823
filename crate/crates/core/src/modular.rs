//! Word-size prime field helpers and a multi-prime gcd for integer
//! polynomials (ascending coefficient vectors).

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &BASES {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primes below `2^62`, largest first.
pub(crate) fn primes() -> impl Iterator<Item = u64> {
    let mut n: u64 = (1 << 62) - 1;
    std::iter::from_fn(move || {
        while !is_prime(n) {
            n -= 2;
        }
        let p = n;
        n -= 2;
        Some(p)
    })
}

pub(crate) fn reduce(c: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut v: Vec<u64> = c.iter().map(|x| x.mod_floor(&pb).to_u64().unwrap()).collect();
    trim(&mut v);
    v
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Monic gcd over `GF(p)`.
pub(crate) fn gcd_mod(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let inv = powmod(*y.last().unwrap(), p - 2, p);
        while x.len() >= y.len() && !x.is_empty() {
            let f = mulmod(*x.last().unwrap(), inv, p);
            let shift = x.len() - y.len();
            for (i, yc) in y.iter().enumerate() {
                let t = mulmod(f, *yc, p);
                x[i + shift] = (x[i + shift] + p - t) % p;
            }
            trim(&mut x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    if let Some(&l) = x.last() {
        let inv = powmod(l, p - 2, p);
        for c in x.iter_mut() {
            *c = mulmod(*c, inv, p);
        }
    }
    x
}

fn symmetric(x: &BigInt, m: &BigInt) -> BigInt {
    let r = x.mod_floor(m);
    if &r + &r > *m {
        r - m
    } else {
        r
    }
}

/// Greatest common divisor of two nonzero primitive integer polynomials,
/// up to sign, by images modulo word-size primes combined with the Chinese
/// remainder theorem and verified by trial division.
pub(crate) fn gcd(a: &[BigInt], b: &[BigInt], divides: impl Fn(&[BigInt]) -> bool) -> Vec<BigInt> {
    let lc_gcd = a.last().unwrap().gcd(b.last().unwrap());
    let mut best_degree = usize::MAX;
    let mut acc: Vec<BigInt> = Vec::new();
    let mut modulus = BigInt::one();
    let mut last_candidate: Option<Vec<BigInt>> = None;
    for p in primes() {
        let (ap, bp) = (reduce(a, p), reduce(b, p));
        if ap.len() != a.len() || bp.len() != b.len() {
            continue;
        }
        let g = gcd_mod(&ap, &bp, p);
        let deg = g.len() - 1;
        if deg == 0 {
            return vec![BigInt::one()];
        }
        if deg > best_degree {
            continue;
        }
        let scale = lc_gcd.mod_floor(&BigInt::from(p)).to_u64().unwrap();
        let image: Vec<u64> = g.iter().map(|&c| mulmod(c, scale, p)).collect();
        if deg < best_degree {
            best_degree = deg;
            acc = image.iter().map(|&c| BigInt::from(c)).collect();
            modulus = BigInt::from(p);
            last_candidate = None;
            continue;
        }
        // combine: x = acc + modulus * ((image - acc) * modulus^-1 mod p)
        let pb = BigInt::from(p);
        let minv = powmod(modulus.mod_floor(&pb).to_u64().unwrap(), p - 2, p);
        for (c, &s) in acc.iter_mut().zip(&image) {
            let r = c.mod_floor(&pb).to_u64().unwrap();
            let t = mulmod((s + p - r) % p, minv, p);
            *c += &modulus * BigInt::from(t);
        }
        modulus *= pb;
        let candidate: Vec<BigInt> = acc.iter().map(|c| symmetric(c, &modulus)).collect();
        if last_candidate.as_ref() == Some(&candidate) {
            let content = candidate.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
            let mut prim: Vec<BigInt> = candidate.iter().map(|c| c / &content).collect();
            if prim.last().unwrap().is_negative() {
                prim = prim.into_iter().map(|c| -c).collect();
            }
            if divides(&prim) {
                return prim;
            }
        }
        last_candidate = Some(candidate);
    }
    unreachable!("the prime iterator is unbounded")
}

fn pack(coeffs: &[BigInt], words: usize) -> BigInt {
    let mut pos = vec![0u64; coeffs.len() * words];
    let mut neg = vec![0u64; coeffs.len() * words];
    for (i, c) in coeffs.iter().enumerate() {
        let target = if c.is_negative() { &mut neg } else { &mut pos };
        for (j, d) in c.magnitude().iter_u64_digits().enumerate() {
            target[i * words + j] = d;
        }
    }
    let from = |v: Vec<u64>| BigInt::from_biguint(Sign::Plus, BigUint::from_slice(&to_u32(&v)));
    from(pos) - from(neg)
}

fn to_u32(v: &[u64]) -> Vec<u32> {
    v.iter().flat_map(|&d| [d as u32, (d >> 32) as u32]).collect()
}

/// Product of two integer polynomials by packing each into one big integer
/// (Kronecker substitution) with 64-bit aligned slots and balanced digits.
pub(crate) fn kronecker_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let bits = |v: &[BigInt]| v.iter().map(|c| c.bits()).max().unwrap_or(0);
    let len = a.len().min(b.len()) as u64;
    let need = bits(a) + bits(b) + (64 - len.leading_zeros() as u64) + 2;
    let words = need.div_ceil(64) as usize;
    let product = pack(a, words) * pack(b, words);
    let negative = product.is_negative();
    let limbs: Vec<u64> = product.magnitude().iter_u64_digits().collect();
    let n = a.len() + b.len() - 1;
    let slot = BigInt::one() << (64 * words);
    let half = BigInt::one() << (64 * words - 1);
    let mut out = Vec::with_capacity(n);
    let mut carry = false;
    for i in 0..n {
        let lo = (i * words).min(limbs.len());
        let hi = ((i + 1) * words).min(limbs.len());
        let mut d = BigInt::from_biguint(Sign::Plus, BigUint::from_slice(&to_u32(&limbs[lo..hi])));
        if carry {
            d += 1;
        }
        carry = d >= half;
        if carry {
            d -= &slot;
        }
        out.push(if negative { -d } else { d });
    }
    out
}
