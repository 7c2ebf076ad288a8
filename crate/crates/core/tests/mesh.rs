use std::f64::consts::PI;
use std::sync::Arc;

use henon_core::mesh::{apply_laplacian, dirichlet_energy, weighted_lp_norm, Field, GridSpec, MeridianGrid};
use henon_core::reduction::WeightKind;
use henon_core::stats::fit_loglog;
use henon_core::Error;

fn ball(dim: usize, n1: usize, n2: usize) -> Arc<MeridianGrid<f64>> {
    Arc::new(GridSpec::ball(1.0, dim, n1, n2, 1.0).build().unwrap())
}

/// Largest error of the discrete Laplacian of `f` against `exact` over
/// interior nodes with `ρ >= rho_min`.
fn laplacian_error(
    grid: Arc<MeridianGrid<f64>>,
    rho_min: f64,
    f: impl Fn(f64, f64) -> f64,
    exact: impl Fn(f64, f64) -> f64,
) -> f64 {
    let field = Field::from_fn(grid.clone(), f);
    let lap = apply_laplacian(&field).unwrap();
    let (n1, n2) = grid.shape();
    let mut worst = 0.0f64;
    for i in 0..n1 - 1 {
        for j in 0..n2 {
            let (rho, sigma) = grid.coords(i, j);
            if rho >= rho_min {
                worst = worst.max((lap.at(i, j) - exact(rho, sigma)).abs());
            }
        }
    }
    worst
}

#[test]
fn uniform_and_graded_grids() {
    let g = ball(3, 64, 32);
    assert!((g.axis1().width(0) - 1.0 / 63.0).abs() < 1e-15);
    assert!((g.axis2().width(0) - PI / 31.0).abs() < 1e-14);
    assert_eq!(g.coords(0, 0), (0.0, 0.0));
    assert_eq!(g.coords(63, 31), (1.0, PI));

    let g: MeridianGrid<f64> = GridSpec::ball(1.0, 3, 64, 32, 1.05).build().unwrap();
    let widths: Vec<f64> = (0..63).map(|k| g.axis1().width(k)).collect();
    for w in widths.windows(2) {
        assert!((w[0] / w[1] - 1.05).abs() < 1e-9);
    }
    assert!(widths[62] < widths[0]);

    let b: MeridianGrid<f64> = GridSpec::half_space(12.0, 24.0, 3, 48, 96).build().unwrap();
    assert_eq!(b.shape(), (48, 96));
    assert_eq!(b.coords(47, 95), (12.0, 24.0));
    assert!((b.axis2().width(10) - 24.0 / 95.0).abs() < 1e-12);
}

#[test]
fn bad_resolutions_rejected() {
    for spec in [
        GridSpec::ball(1.0, 3, 7, 32, 1.0),
        GridSpec::ball(1.0, 3, 64, 4, 1.0),
        GridSpec::ball(1.0, 3, 64, 32, 0.9),
        GridSpec::half_space(0.0, 24.0, 3, 48, 96),
    ] {
        assert!(matches!(spec.build::<f64>(), Err(Error::BadResolution(_))), "{spec:?}");
    }
}

#[test]
fn laplacian_of_radius_squared() {
    let errors: Vec<f64> = [16, 32, 64]
        .iter()
        .map(|&n| laplacian_error(ball(3, n + 1, n / 2 + 1), 0.0, |r, _| r * r, |_, _| 6.0))
        .collect();
    assert!(errors[2] < 1e-9, "{errors:?}");
}

// On the first ring around the center the angular truncation error is
// divided by ρ² ~ h², so pointwise second order is measured at fixed interior
// points.
#[test]
fn last_coordinate_is_harmonic() {
    let sizes = [16usize, 32, 64, 128];
    let errors: Vec<f64> = sizes
        .iter()
        .map(|&n| laplacian_error(ball(3, n + 1, n + 1), 0.25, |r, s| r * s.cos(), |_, _| 0.0))
        .collect();
    let h: Vec<f64> = sizes.iter().map(|&n| 1.0 / n as f64).collect();
    let slope = fit_loglog(&h, &errors).unwrap().slope;
    assert!((slope - 2.0).abs() < 0.2, "{errors:?} slope {slope}");
}

#[test]
fn quartic_converges_at_second_order() {
    // v = ρ⁴ cos²σ in dimension 4: Δv = v_ρρ + 3v_ρ/ρ + (2 cot σ v_σ + v_σσ)/ρ²
    // = ρ²(24 cos²σ - 4 sin²σ) + ... evaluated in closed form below.
    let exact = |r: f64, s: f64| {
        let (c, sn) = (s.cos(), s.sin());
        let radial = 12.0 * c * c + 12.0 * c * c;
        let angular = -4.0 * c * c + 2.0 * (sn * sn - c * c);
        r * r * (radial + angular)
    };
    let sizes = [16usize, 32, 64];
    let errors: Vec<f64> = sizes
        .iter()
        .map(|&n| laplacian_error(ball(4, n + 1, n + 1), 0.25, |r, s| (r * s.cos()).powi(2) * r * r, exact))
        .collect();
    let h: Vec<f64> = sizes.iter().map(|&n| 1.0 / n as f64).collect();
    let slope = fit_loglog(&h, &errors).unwrap().slope;
    assert!((slope - 2.0).abs() < 0.2, "{errors:?} slope {slope}");
}

#[test]
fn zero_field_maps_to_zero() {
    let f = Field::zeros(ball(3, 16, 16));
    assert!(apply_laplacian(&f).unwrap().is_zero());
    assert_eq!(dirichlet_energy(&f), 0.0);
}

/// Midpoint rule with `k x k` cells for `∫₀¹∫₀^π |∇f|² ρ² sin σ dσ dρ`.
fn energy_oracle(grad2: impl Fn(f64, f64) -> f64, k: usize) -> f64 {
    let (hr, hs) = (1.0 / k as f64, PI / k as f64);
    let mut total = 0.0;
    for a in 0..k {
        let r = (a as f64 + 0.5) * hr;
        for b in 0..k {
            let s = (b as f64 + 0.5) * hs;
            total += grad2(r, s) * r * r * s.sin();
        }
    }
    total * hr * hs
}

#[test]
fn energy_of_cap() {
    let oracle = energy_oracle(|r, _| 4.0 * r * r, 2000);
    assert!((oracle - 1.6).abs() < 1e-5);
    let mut f = Field::from_fn(ball(3, 128, 64), |r, _| 1.0 - r * r);
    f.enforce_boundary();
    let e = dirichlet_energy(&f);
    assert!((e - oracle).abs() < 1e-4, "{e} vs {oracle}");
}

#[test]
fn energy_converges_at_second_order() {
    let oracle = energy_oracle(|r, _| 4.0 * r * r, 2000);
    let sizes = [16usize, 32, 64, 128];
    let errors: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            let mut f = Field::from_fn(ball(3, n + 1, n / 2 + 1), |r, _| 1.0 - r * r);
            f.enforce_boundary();
            (dirichlet_energy(&f) - oracle).abs()
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 4.0).abs() < 0.6, "{errors:?}");
    }
}

#[test]
fn total_measure_converges() {
    // ∫₀¹ ρ^{n-1} dρ ∫₀^π sin^{n-2} σ dσ for n = 3 and 4.
    for (dim, exact) in [(3usize, 2.0 / 3.0), (4, PI / 8.0)] {
        let sizes = [16usize, 32, 64];
        let errors: Vec<f64> =
            sizes.iter().map(|&n| (ball(dim, n + 1, n + 1).total_measure() - exact).abs()).collect();
        for e in &errors {
            assert!(*e < 1e-3 || errors.iter().all(|e| *e < 1e-12), "{errors:?}");
        }
        assert!(errors.windows(2).all(|w| w[1] <= w[0] / 3.5 || w[1] < 1e-13), "{dim}: {errors:?}");
    }
}

#[test]
fn exponential_weight_closed_form() {
    let grid = Arc::new(GridSpec::half_space(12.0, 24.0, 3, 48, 96).build::<f64>().unwrap());
    let f = Field::from_fn(grid, |_, _| 1.0);
    let v = weighted_lp_norm(&f, WeightKind::Exponential { gamma: 1.0 }, 0.0, 3.0).unwrap();
    let exact = 144.0 / 2.0 * (1.0 - (-24.0f64).exp());
    assert!((v - exact).abs() < 1e-4, "{v} vs {exact}");
}

#[test]
fn weighted_norm_is_monotone() {
    let grid = ball(3, 32, 24);
    let f = Field::from_fn(grid.clone(), |r, s| (1.0 - r) * (1.0 + s.cos()) * 0.5);
    let g = Field::from_fn(grid.clone(), |r, _| 1.0 - r);
    for kind in [WeightKind::PartialReduced, WeightKind::FullHenonReduced, WeightKind::HyperplaneDirect] {
        let a = weighted_lp_norm(&f, kind, 12.0, 3.0).unwrap();
        let b = weighted_lp_norm(&g, kind, 12.0, 3.0).unwrap();
        assert!(a <= b);
        assert_eq!(weighted_lp_norm(&Field::zeros(grid.clone()), kind, 12.0, 3.0).unwrap(), 0.0);
    }
}

#[test]
fn discrete_integration_by_parts() {
    for grid in [ball(3, 40, 30), Arc::new(GridSpec::half_space(4.0, 6.0, 4, 20, 30).build().unwrap())] {
        let mut f = Field::from_fn(grid.clone(), |a, b| (a + 0.3).sin() * (b * 0.7).cos() + a * b);
        f.enforce_boundary();
        let lap = apply_laplacian(&f).unwrap();
        let vol = grid.volumes();
        let pairing: f64 = lap.values().iter().zip(f.values()).zip(&vol).map(|((l, v), w)| -l * v * w).sum();
        let e = dirichlet_energy(&f);
        assert!((pairing - e).abs() <= 1e-10 * e, "{pairing} vs {e}");
    }
}

#[test]
fn field_snapshot_csv() {
    let grid = ball(3, 8, 8);
    let f = Field::from_fn(grid, |r, _| 1.0 - r);
    let mut buf = Vec::new();
    f.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rho,sigma,value"));
    assert_eq!(lines.next(), Some("0,0,1"));
    assert_eq!(text.lines().count(), 65);
}
