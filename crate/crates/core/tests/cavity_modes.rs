use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;
use sectorcav::cavity::{
    driven_field, eigenfunction, radial_roots, solve_modes, FeedPoint, ModeSolverConfig,
    SectorGeometry,
};
use sectorcav::specfun::{bessel_deriv, Kind, Order};

fn sector90() -> SectorGeometry<f64> {
    SectorGeometry::new(1.5e-3, 14e-3, FRAC_PI_2, 0.0, 1.27e-3, 6.3, 0.0023).unwrap()
}

/// Characteristic function built from the recurrence-based derivatives.
fn delta_oracle(v: f64, q: f64, x: f64) -> f64 {
    let o = Order::new(v).unwrap();
    bessel_deriv(Kind::J, o, x * q).unwrap() * bessel_deriv(Kind::Y, o, x).unwrap()
        - bessel_deriv(Kind::J, o, x).unwrap() * bessel_deriv(Kind::Y, o, x * q).unwrap()
}

/// Dense sign-change scan with step 1e-4 followed by plain bisection.
fn brute_force_roots(v: f64, q: f64, wanted: usize, upper: f64) -> Vec<f64> {
    let step = 1e-4;
    let mut roots = Vec::new();
    let mut a = (v - 0.01).max(step);
    let mut fa = delta_oracle(v, q, a);
    while roots.len() < wanted && a < upper {
        let b = a + step;
        let fb = delta_oracle(v, q, b);
        if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let fm = delta_oracle(v, q, mid);
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    roots
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn solver_matches_brute_force_scan(q in 0.05f64..0.8, v in 0.0f64..6.0) {
        let cfg = ModeSolverConfig::default();
        let roots = radial_roots(v, q, 2, &cfg).unwrap();
        let oracle = brute_force_roots(v, q, 2, roots[1] + 0.01);
        prop_assert_eq!(oracle.len(), 2);
        for (r, o) in roots.iter().zip(&oracle) {
            prop_assert!((r - o).abs() <= 1e-8 * o, "v={} q={} solver {} oracle {}", v, q, r, o);
        }
    }
}

#[test]
fn small_inner_radius_tends_to_solid_sector() {
    let cfg = ModeSolverConfig::default();
    let roots = radial_roots(2.0, 1e-3, 1, &cfg).unwrap();
    assert!(
        (roots[0] - 3.054_236_928_227_14f64).abs() < 1e-3,
        "{}",
        roots[0]
    );
}

#[test]
fn roots_increase_with_radial_index() {
    let modes = solve_modes(&sector90(), 4, 4, &ModeSolverConfig::default()).unwrap();
    for n in 0..=4 {
        let mut xs: Vec<_> = modes.iter().filter(|m| m.n == n).collect();
        xs.sort_by_key(|m| m.m);
        assert!(xs.windows(2).all(|w| w[0].x < w[1].x));
    }
}

#[test]
fn frequency_scales_inversely_with_size() {
    let cfg = ModeSolverConfig::default();
    let base = solve_modes(&sector90(), 3, 2, &cfg).unwrap();
    let doubled = solve_modes(&sector90().scaled(2.0), 3, 2, &cfg).unwrap();
    for (a, b) in base.iter().zip(&doubled) {
        assert_eq!(a.x, b.x);
        assert!((a.frequency / b.frequency - 2.0).abs() <= 1e-14);
    }
    let odd = solve_modes(&sector90().scaled(1.7), 3, 2, &cfg).unwrap();
    for (a, b) in base.iter().zip(&odd) {
        assert!((a.frequency / b.frequency / 1.7 - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn frequency_scales_with_inverse_root_permittivity() {
    let cfg = ModeSolverConfig::default();
    let air = SectorGeometry {
        eps_r: 1.0,
        ..sector90()
    };
    let a = solve_modes(&sector90(), 3, 2, &cfg).unwrap();
    let b = solve_modes(&air, 3, 2, &cfg).unwrap();
    for (a, b) in a.iter().zip(&b) {
        assert!((b.frequency / a.frequency / 6.3f64.sqrt() - 1.0).abs() <= 1e-14);
    }
}

/// Composite Simpson weights for `n` panels on `[a, b]`.
fn simpson_nodes(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (a + i as f64 * h, w * h / 3.0)
        })
        .collect()
}

#[test]
fn eigenfunctions_are_orthogonal() {
    let g = sector90();
    let modes = solve_modes(&g, 2, 2, &ModeSolverConfig::default()).unwrap();
    let rs = simpson_nodes(g.inner_radius, g.outer_radius, 400);
    let ps = simpson_nodes(0.0, g.sector_angle, 200);
    let sampled: Vec<Vec<f64>> = modes
        .iter()
        .map(|m| {
            let mut out = Vec::with_capacity(rs.len() * ps.len());
            for &(r, _) in &rs {
                for &(p, _) in &ps {
                    out.push(eigenfunction(&g, m, r, p).unwrap());
                }
            }
            out
        })
        .collect();
    let inner = |a: &[f64], b: &[f64]| {
        let mut s = 0.0;
        for (i, &(r, wr)) in rs.iter().enumerate() {
            for (j, &(_, wp)) in ps.iter().enumerate() {
                let k = i * ps.len() + j;
                s += a[k] * b[k] * r * wr * wp;
            }
        }
        s
    };
    let norms: Vec<f64> = sampled.iter().map(|s| inner(s, s)).collect();
    for i in 0..modes.len() {
        for j in (i + 1)..modes.len() {
            let c = inner(&sampled[i], &sampled[j]);
            let scale = (norms[i] * norms[j]).sqrt();
            assert!(
                c.abs() <= 1e-6 * scale,
                "modes ({},{}) and ({},{}): overlap {:e}",
                modes[i].m,
                modes[i].n,
                modes[j].m,
                modes[j].n,
                c / scale
            );
        }
    }
}

#[test]
fn resonant_mode_dominates_driven_field() {
    let g = sector90();
    let cfg = ModeSolverConfig::default();
    let modes = solve_modes(&g, 4, 3, &cfg).unwrap();
    let m11 = *modes.iter().find(|m| m.m == 1 && m.n == 1).unwrap();
    let feed = FeedPoint::new(&g, 6.9e-3, 0.3).unwrap();
    let field = driven_field(&g, feed, m11.frequency, (4, 3), 200.0, &cfg).unwrap();
    let mut e = Vec::new();
    let mut psi = Vec::new();
    for i in 0..50 {
        let r = g.inner_radius + (g.outer_radius - g.inner_radius) * i as f64 / 49.0;
        for j in 0..50 {
            let p = g.sector_angle * j as f64 / 49.0;
            e.push(field.eval(r, p).unwrap().norm());
            psi.push(eigenfunction(&g, &m11, r, p).unwrap().abs());
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (me, mp) = (mean(&e), mean(&psi));
    let cov: f64 = e.iter().zip(&psi).map(|(a, b)| (a - me) * (b - mp)).sum();
    let ve: f64 = e.iter().map(|a| (a - me).powi(2)).sum();
    let vp: f64 = psi.iter().map(|b| (b - mp).powi(2)).sum();
    let corr = cov / (ve * vp).sqrt();
    assert!(corr >= 0.99, "correlation {corr}");
}

#[test]
fn feed_on_nodal_line_of_every_odd_mode() {
    // cos(v phi) with v = 2n vanishes at phi = pi/4 for odd n only
    let g = sector90();
    let modes = solve_modes(&g, 3, 1, &ModeSolverConfig::default()).unwrap();
    for m in modes.iter().filter(|m| m.n % 2 == 1) {
        let v = eigenfunction(&g, m, 7e-3, PI / 4.0).unwrap();
        let r = eigenfunction(&g, m, 7e-3, 0.0).unwrap();
        assert!(v.abs() <= 1e-15 * r.abs().max(1.0));
    }
}

#[test]
fn closed_form_norm_matches_quadrature() {
    use sectorcav::cavity::mode_norm;
    let g = sector90();
    let modes = solve_modes(&g, 3, 2, &ModeSolverConfig::default()).unwrap();
    let rs = simpson_nodes(g.inner_radius, g.outer_radius, 800);
    let ps = simpson_nodes(0.0, g.sector_angle, 400);
    for m in &modes {
        let mut q = 0.0;
        for &(r, wr) in &rs {
            for &(p, wp) in &ps {
                q += eigenfunction(&g, m, r, p).unwrap().powi(2) * r * wr * wp;
            }
        }
        let n = mode_norm(&g, m).unwrap();
        assert!((n - q).abs() <= 1e-8 * q, "({}, {}): {n} vs {q}", m.m, m.n);
    }
}
