//! Discrete derivative checks: the objective gradient against central
//! differences, and the exact quadratic-form remainder of the forward map.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavespec_core::contour::quadrature_plane;
use wavespec_core::objective::{grad_f, theta};
use wavespec_core::{
    assemble_table, DopplerSpectrum, FrequencyDomain, GridGeometry, ObjectiveParams, QuadratureTable, RadarParams,
    SpectrumGrid,
};

fn table(n: usize, samples: usize) -> QuadratureTable {
    let params = RadarParams::new(0.51).unwrap();
    let geom = GridGeometry::square(n, 2.0).unwrap();
    let quad = quadrature_plane(&geom, &params, 4 * (n - 1) + 1).unwrap();
    let domain = FrequencyDomain::symmetric(&params, 2.8, samples).unwrap();
    assemble_table(&domain, &params, &geom, &quad).unwrap()
}

fn random_grid(geom: GridGeometry, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> SpectrumGrid {
    SpectrumGrid::from_fn(geom, |_, _| rng.random_range(lo..hi))
}

#[test]
fn gradient_matches_central_differences() {
    let table = table(16, 65);
    let geom = *table.geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let s = random_grid(geom, &mut rng, 0.1, 1.0);
    let sigma_vals = (0..table.domain().len()).map(|_| rng.random_range(0.0..0.05)).collect();
    let sigma = DopplerSpectrum::new(table.domain().clone(), sigma_vals).unwrap();
    let obj = ObjectiveParams::new(1e-3, 1e-6).unwrap();
    let smooth = |x: &SpectrumGrid| theta(x, &sigma, &table, &obj).unwrap().smooth();
    let grad = grad_f(&s, &sigma, &table, &obj).unwrap();
    let weights = geom.cell_weights();

    let eps = 1e-4;
    let mut worst = 0.0_f64;
    for _ in 0..50 {
        let h = random_grid(geom, &mut rng, -1.0, 1.0);
        let plus = SpectrumGrid::from_values(geom, s.values().iter().zip(h.values()).map(|(a, b)| a + eps * b).collect())
            .unwrap();
        let minus = SpectrumGrid::from_values(geom, s.values().iter().zip(h.values()).map(|(a, b)| a - eps * b).collect())
            .unwrap();
        let fd = (smooth(&plus) - smooth(&minus)) / (2.0 * eps);
        let analytic: f64 = grad.values().iter().zip(h.values()).zip(&weights).map(|((g, h), c)| c * g * h).sum();
        worst = worst.max((fd - analytic).abs() / analytic.abs().max(1e-300));
    }
    assert!(worst < 1e-5, "max relative error {worst:e}");
}

#[test]
fn quadratic_remainder_is_exact() {
    let table = table(12, 41);
    let geom = *table.geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..5 {
        let s = random_grid(geom, &mut rng, 0.0, 1.0);
        let h = random_grid(geom, &mut rng, -0.5, 0.5);
        let sh: Vec<f64> = s.values().iter().zip(h.values()).map(|(a, b)| a + b).collect();
        let a_sh = table.eval_all(&sh);
        let a_s = table.eval_all(s.values());
        let a_h = table.eval_all(h.values());
        let d = table.eval_derivative(s.values(), h.values());
        let scale = a_sh.iter().chain(&a_s).chain(&d).fold(0.0_f64, |m, v| m.max(v.abs()));
        for k in 0..a_sh.len() {
            let lhs = a_sh[k] - a_s[k] - d[k];
            assert!((lhs - a_h[k]).abs() <= 1e-12 * scale, "k={k}: {lhs} vs {}", a_h[k]);
        }
    }
}
