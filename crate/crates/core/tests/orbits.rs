use scheme_periods::models::instantiate;
use scheme_periods::numeric::{run_orbit, OrbitSource};
use scheme_periods::periodicity::{build_cyclic_system, enumerate_orbits};
use scheme_periods::schemes::{build_scheme, SchemeKind};

const CUBIC_PERIODS: [f64; 2] = [7.59556885597975, 60.7538695639458];

#[test]
fn newton_orbits_are_among_all_real_orbits() {
    let m = instantiate("cubic", &[]).unwrap();
    let s = build_scheme(SchemeKind::Midpoint, &m.field).unwrap();
    let p = build_cyclic_system(&s, 5, &m.default_x0).unwrap();
    for t in CUBIC_PERIODS {
        let orbit = run_orbit(&s, &[0.0, 1.0], t / 5.0, 5).unwrap();
        assert_eq!(orbit.source, OrbitSource::FreeRun);
        let all = enumerate_orbits(&p, t).unwrap();
        assert!(!all.is_empty(), "T = {t}: no real branch chain");
        let found = all.iter().any(|(chain, _)| {
            chain
                .iter()
                .zip(&orbit.points)
                .all(|(a, b)| a.iter().zip(b).all(|(u, v)| (u - v).abs() < 1e-9))
        });
        assert!(found, "T = {t}: Newton orbit is not a real branch chain");
        assert!(all[0].1 < 1e-9, "T = {t}: best chain residual {}", all[0].1);
    }
}

#[test]
fn orbit_points_exclude_the_closing_state() {
    let m = instantiate("linear", &[]).unwrap();
    let s = build_scheme(SchemeKind::Midpoint, &m.field).unwrap();
    let dt = 2.0 * (std::f64::consts::PI / 15.0).tan();
    let o = run_orbit(&s, &[0.0, 1.0], dt, 15).unwrap();
    assert_eq!(o.points.len(), 15);
    assert_eq!(o.all_points().len(), 16);
    assert!(o.closure_residual < 1e-12);
    for p in o.all_points() {
        assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-12);
    }
}
