#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use bers_probe::grunsky::{grunsky_from_map, grunsky_norm, GrunskyMatrix, PowerConfig};
use bers_probe::ode::{corner_turning, SchwarzSolution, SolverConfig};
use bers_probe::polygon::{circular_polygon_schwarzian, regular_ngon_exterior_map, PolygonSpec};
use bers_probe::schwarzian::Evaluate;
use bers_probe::series::ExteriorSeries;
use bers_probe::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grunsky coefficients by trapezoidal double contour integration of
/// `log((f(z) - f(ζ))/(z - ζ))` over `|z| = |ζ| = r`.
fn contour_grunsky(f: &ExteriorSeries<f64>, n: usize, r: f64, m: usize) -> Vec<Vec<C64>> {
    let z: Vec<C64> = (0..m)
        .map(|k| C64::from_polar(r, 2.0 * PI * k as f64 / m as f64))
        .collect();
    let fz: Vec<C64> = z.iter().map(|&p| f.eval(p)).collect();
    let mut kernel = vec![C64::new(0.0, 0.0); m * m];
    for j in 0..m {
        for k in 0..m {
            let q = if j == k {
                f.eval_derivative(z[j])
            } else {
                (fz[j] - fz[k]) / (z[j] - z[k])
            };
            kernel[j * m + k] = q.ln();
        }
    }
    let mut out = vec![vec![C64::new(0.0, 0.0); n + 1]; n + 1];
    for a in 1..=n {
        for b in 1..=n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..m {
                let zj = z[j].powu(a as u32);
                for k in 0..m {
                    acc += kernel[j * m + k] * zj * z[k].powu(b as u32);
                }
            }
            out[a][b] = -acc / (m * m) as f64;
        }
    }
    out
}

#[test]
fn grunsky_coefficients_match_contour_integrals() {
    let square = regular_ngon_exterior_map::<f64>(4, 16).unwrap();
    let lens =
        ExteriorSeries::from_terms(16, &[(1, C64::new(0.2, 0.1)), (2, C64::new(-0.05, 0.03))])
            .unwrap();
    for f in [square, lens] {
        let alpha = grunsky_from_map(&f, 6).unwrap();
        let oracle = contour_grunsky(&f, 6, 1.4, 96);
        for m in 1..=6 {
            for n in 1..=6 {
                let d = (alpha.get(m, n) - oracle[m][n]).norm();
                assert!(d < 1e-10, "alpha[{m}][{n}] off by {d}");
            }
        }
    }
}

#[test]
fn grunsky_norm_matches_svd() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [1usize, 3, 8, 20] {
        let mut data = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        let dense = DMatrix::from_row_slice(n, n, &data);
        let sigma = dense.singular_values().max();
        let b = GrunskyMatrix::from_rows(n, data).unwrap();
        let ours = grunsky_norm(&b, &PowerConfig::default());
        assert!(ours.converged);
        assert!(
            (ours.value - sigma).abs() < 1e-9 * sigma,
            "n = {n}: {} vs {sigma}",
            ours.value
        );
    }
}

#[test]
fn far_field_matches_partial_fractions() {
    for n in 3..=8 {
        let phi = circular_polygon_schwarzian::<f64>(&PolygonSpec::regular(n)).unwrap();
        for &r in &[3.0, 4.5, 12.0, 1e3] {
            for k in 0..7 {
                let z = C64::from_polar(r, 0.37 + k as f64);
                let terms: Vec<C64> = phi
                    .poles()
                    .iter()
                    .zip(phi.quadratic())
                    .zip(phi.residue())
                    .map(|((&a, &c), &d)| (c / (z - a) + d) / (z - a))
                    .collect();
                let direct: C64 = terms.iter().sum();
                let rounding: f64 = terms.iter().map(|t| t.norm()).sum::<f64>() * 1e-15;
                let far = phi.eval(z).unwrap();
                let tol = 1e-10 * direct.norm() + rounding;
                assert!(
                    (far - direct).norm() < tol,
                    "n = {n}, z = {z}: {far} vs {direct}"
                );
            }
        }
    }
}

#[test]
fn square_corners_show_up_in_boundary_samples() {
    let phi = circular_polygon_schwarzian::<f64>(&PolygonSpec::regular(4)).unwrap();
    let sol = SchwarzSolution::new(&phi, C64::new(1.0, 0.0), SolverConfig::default()).unwrap();
    let m = 1024;
    let samples = sol.sample_circle(1.001, m).unwrap();
    let corners = corner_turning(&samples.samples, 4, 16);
    assert_eq!(corners.len(), 4);
    for (q, &(i, turn)) in corners.iter().enumerate() {
        assert_eq!(i, q * m / 4, "corner {q} at sample {i}");
        assert!((turn - PI / 2.0).abs() < 0.1, "corner {q} turns by {turn}");
    }
}
