//! Strategies and property bodies shared by the property suite and the
//! acceptance run.

#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use scheme_periods::algebra::{Monomial, MonomialOrder, Polynomial, Ring, Scalar};
use scheme_periods::groebner::{
    buchberger, elimination_ideal, is_groebner_basis, normal_form, univariate_eliminant, GroebnerConfig, PolySystem,
};
use scheme_periods::models::instantiate;
use scheme_periods::numeric::{newton_step, rk_reference};
use scheme_periods::schemes::{build_scheme, kahan_rational_map, SchemeKind, SchemeSystem, DT};
use scheme_periods::univar::{deflate, isolate_positive_roots, sturm_count, Bound, UPoly};

pub type Check = Result<(), TestCaseError>;

pub fn ring4() -> Arc<Ring> {
    Ring::new(["w", "x", "y", "z"])
}

pub fn q(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn scalar() -> impl Strategy<Value = Scalar> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

/// Random polynomial in `ring` with total degree at most `max_degree`.
pub fn polynomial(ring: Arc<Ring>, max_degree: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    let nvars = ring.nvars();
    let monomial = prop::collection::vec(0u32..=max_degree, nvars).prop_filter_map("degree", move |e| {
        (e.iter().sum::<u32>() <= max_degree).then(|| Monomial::from_exponents(e))
    });
    prop::collection::vec((monomial, scalar()), 0..=max_terms)
        .prop_map(move |terms| Polynomial::from_terms(&ring, terms))
}

pub fn poly4() -> impl Strategy<Value = Polynomial> {
    polynomial(ring4(), 4, 5)
}

pub fn point4() -> impl Strategy<Value = Vec<Scalar>> {
    prop::collection::vec(scalar(), 4)
}

#[allow(clippy::eq_op)]
pub fn ring_axioms(a: &Polynomial, b: &Polynomial, c: &Polynomial) -> Check {
    let zero = Polynomial::zero(a.ring());
    let one = Polynomial::one(a.ring());
    prop_assert_eq!(&(a + b), &(b + a));
    prop_assert_eq!(&(a * b), &(b * a));
    prop_assert_eq!(&(&(a + b) + c), &(a + &(b + c)));
    prop_assert_eq!(&(&(a * b) * c), &(a * &(b * c)));
    prop_assert_eq!(&(a * &(b + c)), &(&(a * b) + &(a * c)));
    prop_assert_eq!(&(a + &zero), a);
    prop_assert_eq!(&(a * &one), a);
    prop_assert_eq!(&(a - a), &zero);
    prop_assert_eq!(&(a + &(-a)), &zero);
    Ok(())
}

pub fn canonical_roundtrip(p: &Polynomial) -> Check {
    let text = p.to_text();
    let back = Polynomial::parse(p.ring(), &text).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, p);
    prop_assert_eq!(back.to_text(), text);
    Ok(())
}

pub fn evaluation_is_a_homomorphism(a: &Polynomial, b: &Polynomial, pt: &[Scalar]) -> Check {
    let ev = |p: &Polynomial| p.evaluate(pt).unwrap();
    prop_assert_eq!(ev(&(a * b)), ev(a) * ev(b));
    prop_assert_eq!(ev(&(a + b)), ev(a) + ev(b));
    Ok(())
}

/// Substituting polynomials and then evaluating equals evaluating the
/// images first.
pub fn substitution_composes(p: &Polynomial, images: &[Polynomial], pt: &[Scalar]) -> Check {
    let ring = p.ring();
    let map: HashMap<String, Polynomial> = ring.names().iter().cloned().zip(images.iter().cloned()).collect();
    let composed = p
        .substitute(&map, ring)
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    let inner: Vec<Scalar> = images.iter().map(|g| g.evaluate(pt).unwrap()).collect();
    prop_assert_eq!(composed.evaluate(pt).unwrap(), p.evaluate(&inner).unwrap());
    Ok(())
}

/// Basis is Gröbner, reduces every generator to zero, each basis element
/// lies in the ideal (checked by membership in the reverse direction via a
/// second run), and two runs agree.
pub fn buchberger_postcondition(gens: &[Polynomial], order: MonomialOrder) -> Check {
    let ring = gens[0].ring();
    let system = PolySystem::new(ring, gens.to_vec(), order).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let cfg = GroebnerConfig {
        max_reductions: 20_000,
        ..GroebnerConfig::default()
    };
    let Ok(gb) = buchberger(&system, &cfg) else {
        return Err(TestCaseError::reject("budget"));
    };
    prop_assert!(is_groebner_basis(&gb.basis, order));
    for g in gens {
        prop_assert!(
            normal_form(g, &gb.basis, order).is_zero(),
            "generator not in ideal: {}",
            g
        );
    }
    let again = buchberger(&system, &cfg).unwrap();
    prop_assert_eq!(&again.basis, &gb.basis);
    for (i, b) in gb.basis.iter().enumerate() {
        let others: Vec<Polynomial> = gb
            .basis
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, p)| p.clone())
            .collect();
        let lm = b.leading_term(order).unwrap().0;
        prop_assert!(
            others.iter().all(|o| !o.leading_term(order).unwrap().0.divides(lm)),
            "basis not reduced"
        );
    }
    Ok(())
}

/// Real roots of a univariate integer polynomial, via positive isolation of
/// `p(t)` and `p(-t)`.
pub fn real_roots(p: &UPoly) -> Vec<f64> {
    let e = deflate(p);
    let mut out: Vec<f64> = Vec::new();
    if e.deflation > 0 {
        out.push(0.0);
    }
    if !e.poly.is_constant() {
        out.extend(isolate_positive_roots(&deflate(&e.poly)).iter().map(|c| c.value));
        out.extend(
            isolate_positive_roots(&deflate(&e.poly.reflect()))
                .iter()
                .map(|c| -c.value),
        );
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Two-variable toy ideal `<prod (x - a_i), d(x) t - n(x)>`: the values of
/// `t` on its variety are `n(a_i) / d(a_i)`, computed directly, and must be
/// the real roots of both eliminants of `x`.
pub fn elimination_matches_brute_force(xs: &[i64], num: &[i64], den: &[i64]) -> Check {
    let ring = Ring::new(["x", "t"]);
    let x = Polynomial::var(&ring, "x").unwrap();
    let t = Polynomial::var(&ring, "t").unwrap();
    let horner = |c: &[i64], v: &Polynomial| {
        c.iter().rev().fold(Polynomial::zero(&ring), |acc, &k| {
            &(&acc * v) + &Polynomial::from_int(&ring, k)
        })
    };
    let mut f = Polynomial::one(&ring);
    for &a in xs {
        f = &f * &(&x - &Polynomial::from_int(&ring, a));
    }
    let g = &(&horner(den, &x) * &t) - &horner(num, &x);
    let eval = |c: &[i64], v: f64| c.iter().rev().fold(0.0, |acc, &k| acc * v + k as f64);
    if xs.iter().any(|&a| eval(den, a as f64) == 0.0) {
        return Err(TestCaseError::reject("pole on the variety"));
    }
    let mut brute: Vec<f64> = xs.iter().map(|&a| eval(num, a as f64) / eval(den, a as f64)).collect();
    brute.sort_by(f64::total_cmp);
    brute.dedup_by(|a, b| (*a - *b).abs() < 1e-9);

    let system = PolySystem::new(&ring, vec![f, g], MonomialOrder::Lex).unwrap();
    let cfg = GroebnerConfig::default();
    let tv = ring.require("t").unwrap();
    let (mono, _) = univariate_eliminant(&system, "t", &cfg).unwrap();
    let lex = elimination_ideal(&system, &["t"], &cfg).unwrap();
    prop_assert_eq!(lex.len(), 1);
    for p in [&mono, &lex[0]] {
        let got = real_roots(&UPoly::from_polynomial(p, tv).unwrap());
        prop_assert_eq!(got.len(), brute.len(), "{} vs {:?}", p, brute);
        for (a, b) in got.iter().zip(&brute) {
            prop_assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0), "{} vs {}", a, b);
        }
    }
    Ok(())
}

/// Product of `(t - r)` over the roots: Sturm counts every distinct root
/// and positive isolation lands on each positive one.
pub fn sturm_and_isolation(roots: &[(i64, i64)]) -> Check {
    let mut p = UPoly::one();
    let mut values: Vec<f64> = Vec::new();
    for &(n, d) in roots {
        p = p.mul(&UPoly::from_i64(&[-n, d]));
        values.push(n as f64 / d as f64);
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    let total = sturm_count(&p.squarefree_part(), &Bound::NegInf, &Bound::PosInf);
    prop_assert_eq!(total, values.len());
    let split = Bound::Finite(q(0, 1));
    let below = sturm_count(&p.squarefree_part(), &Bound::NegInf, &split);
    let above = sturm_count(&p.squarefree_part(), &split, &Bound::PosInf);
    prop_assert_eq!(below + above, total);
    let positive: Vec<f64> = values.iter().copied().filter(|&v| v > 0.0).collect();
    let certs = isolate_positive_roots(&deflate(&p));
    prop_assert_eq!(certs.len(), positive.len());
    for (c, v) in certs.iter().zip(&positive) {
        prop_assert!((c.value - v).abs() <= 1e-12 * v.max(1.0), "{} vs {}", c.value, v);
    }
    Ok(())
}

pub fn scheme(model: &str, kind: SchemeKind) -> SchemeSystem {
    build_scheme(kind, &instantiate(model, &[]).unwrap().field).unwrap()
}

pub const QUADRATIC_MODELS: [&str; 3] = ["linear", "vl", "top"];
pub const MODELS: [&str; 4] = ["linear", "cubic", "vl", "top"];

fn residuals_at(s: &SchemeSystem, x: &[Scalar], xh: &[Scalar], dt: &Scalar) -> Vec<Scalar> {
    let mut pt = vec![Scalar::from_integer(0.into()); s.ring.nvars()];
    for (i, v) in s.current_vars().iter().enumerate() {
        pt[s.ring.index_of(v).unwrap()] = x[i].clone();
    }
    for (i, v) in s.advanced_vars().iter().enumerate() {
        pt[s.ring.index_of(v).unwrap()] = xh[i].clone();
    }
    pt[s.ring.index_of(DT).unwrap()] = dt.clone();
    s.residuals.iter().map(|r| r.evaluate(&pt).unwrap()).collect()
}

/// Residuals vanish at `x̂ = x`, `dt = 0`; the midpoint scheme also obeys
/// `g(x, x̂, dt) = -g(x̂, x, -dt)`.
pub fn scheme_identities(model: &str, x: &[Scalar], xh: &[Scalar], dt: &Scalar) -> Check {
    let zero = Scalar::from_integer(0.into());
    for kind in [SchemeKind::Midpoint, SchemeKind::ExplicitEuler, SchemeKind::Kahan] {
        let Ok(field) = instantiate(model, &[]).map(|m| m.field) else {
            continue;
        };
        let Ok(s) = build_scheme(kind, &field) else { continue };
        let d = s.field.dimension();
        prop_assert!(residuals_at(&s, &x[..d], &x[..d], &zero).iter().all(|r| *r == zero));
        if kind != SchemeKind::ExplicitEuler {
            let fwd = residuals_at(&s, &x[..d], &xh[..d], dt);
            let back = residuals_at(&s, &xh[..d], &x[..d], &-dt);
            for (a, b) in fwd.iter().zip(&back) {
                prop_assert_eq!(a, &-b, "{} {} not symmetric", model, kind);
            }
        }
    }
    Ok(())
}

/// The exact Kahan step map satisfies the scheme residuals.
pub fn kahan_map_solves_scheme(model: &str, x: &[Scalar], dt: &Scalar) -> Check {
    let s = scheme(model, SchemeKind::Kahan);
    let d = s.field.dimension();
    let map = kahan_rational_map(&s.field).unwrap();
    let Some(xh) = map.apply_exact(&x[..d], dt) else {
        return Err(TestCaseError::reject("singular step"));
    };
    let zero = Scalar::from_integer(0.into());
    prop_assert!(residuals_at(&s, &x[..d], &xh, dt).iter().all(|r| *r == zero));
    Ok(())
}

/// Midpoint on the linear oscillator keeps `x^2 + y^2` to `1e-12` per step.
pub fn midpoint_conserves_norm(x: [f64; 2], dt: f64) -> Check {
    let s = scheme("linear", SchemeKind::Midpoint);
    let xh = newton_step(&s, &x, dt).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let (n0, n1) = (x[0] * x[0] + x[1] * x[1], xh[0] * xh[0] + xh[1] * xh[1]);
    prop_assert!((n1 - n0).abs() <= 1e-12 * n0.max(1.0), "{} -> {}", n0, n1);
    Ok(())
}

/// Explicit Euler on the linear oscillator multiplies `x^2 + y^2` by
/// `1 + dt^2` each step.
pub fn euler_norm_growth(x: [f64; 2], dt: f64, steps: usize) -> Check {
    let s = scheme("linear", SchemeKind::ExplicitEuler);
    let mut cur = x.to_vec();
    for _ in 0..steps {
        let next = newton_step(&s, &cur, dt).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let (n0, n1) = (cur[0] * cur[0] + cur[1] * cur[1], next[0] * next[0] + next[1] * next[1]);
        let want = (1.0 + dt * dt) * n0;
        prop_assert!(
            (n1 - want).abs() <= 8.0 * f64::EPSILON * want.max(f64::MIN_POSITIVE),
            "{} vs {}",
            n1,
            want
        );
        cur = next;
    }
    Ok(())
}

/// Both quadratic integrals of the top drift by less than `1e-6` along the
/// reference trajectory at `h = 1e-4`.
pub fn top_integrals(x0: [f64; 3], t_end: f64) -> Check {
    let m = instantiate("top", &[]).unwrap();
    let (a, b, c) = (8.0, 7.0, 2.0);
    let energy = |s: &[f64]| a * s[0] * s[0] + b * s[1] * s[1] + c * s[2] * s[2];
    let momentum = |s: &[f64]| a * a * s[0] * s[0] + b * b * s[1] * s[1] + c * c * s[2] * s[2];
    let traj = rk_reference(&m.field, &x0, t_end, 1e-4).unwrap();
    let (e0, m0) = (energy(&x0), momentum(&x0));
    for s in &traj.states {
        prop_assert!((energy(s) - e0).abs() <= 1e-6 * e0.max(1.0));
        prop_assert!((momentum(s) - m0).abs() <= 1e-6 * m0.max(1.0));
    }
    Ok(())
}

/// Run a property body `cases` times under a fixed-seed runner; returns the
/// failure message, if any.
pub fn run_property<S: Strategy>(cases: u32, strategy: S, body: impl Fn(S::Value) -> Check) -> Result<(), String> {
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        proptest::test_runner::TestRng::deterministic_rng(proptest::test_runner::RngAlgorithm::ChaCha),
    );
    runner.run(&strategy, body).map_err(|e| e.to_string())
}
