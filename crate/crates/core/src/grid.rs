//! Parameter grid for the statements that hold at every scale: Bohr set size,
//! the pigeonhole box argument, the `beta` bounds, and the Fourier identities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bohr::{
    beta_lemma, bohr_size_lemma, build_bohr_set, pigeonhole_box_witness, route_disagreement,
    triple_sum,
};
use crate::error::Result;
use crate::fourier::{convolve, dft, idft, WeightVector};
use crate::report::{LemmaReport, Regime};

pub const GRID_MODULI: [u64; 3] = [113, 1009, 10007];
pub const GRID_EPSILONS: [f64; 3] = [0.05, 0.1, 0.2];
pub const GRID_KAPPAS: [f64; 2] = [0.1, 0.25];
pub const GRID_MAX_FREQUENCIES: usize = 4;
pub const IDENTITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridCase {
    pub modulus: u64,
    pub kappa: f64,
    pub epsilon: f64,
    pub frequencies: Vec<u64>,
    pub bohr_size: usize,
    pub reports: Vec<LemmaReport>,
}

/// Bohr and beta checks on one instance.
pub fn check_instance(
    modulus: u64,
    kappa: f64,
    epsilon: f64,
    frequencies: &[u64],
) -> Result<GridCase> {
    let bohr = build_bohr_set(frequencies, kappa, epsilon, modulus)?;
    let boxw = pigeonhole_box_witness(frequencies, kappa, epsilon, modulus)?;
    let mut reports = vec![bohr_size_lemma(&bohr)];
    reports.push(LemmaReport::at_least(
        "bohr-box-occupancy",
        boxw.elements.len() as f64,
        boxw.required,
        Regime::Exact,
    ));
    let outside = boxw
        .elements
        .iter()
        .filter(|&&x| !bohr.contains((x - boxw.x0).rem_euclid(modulus as i64) as u64))
        .count();
    reports.push(LemmaReport::at_most(
        "bohr-box-translation",
        outside as f64,
        0.0,
        Regime::Exact,
    ));
    if !boxw.translation_verified {
        reports.push(LemmaReport::at_most(
            "bohr-box-translation-scan",
            1.0,
            0.0,
            Regime::Exact,
        ));
    }
    reports.extend(beta_lemma(&bohr).reports);
    Ok(GridCase {
        modulus,
        kappa,
        epsilon,
        frequencies: frequencies.to_vec(),
        bohr_size: bohr.len(),
        reports,
    })
}

/// Every `(N, kappa, epsilon, |R|)` combination of the grid, with the
/// frequencies drawn from ChaCha8 seeded by `seed`.
pub fn bohr_grid(seed: u64) -> Result<Vec<GridCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for &n in &GRID_MODULI {
        for &kappa in &GRID_KAPPAS {
            for &epsilon in &GRID_EPSILONS {
                for size in 0..=GRID_MAX_FREQUENCIES {
                    let freqs: Vec<u64> = (0..size).map(|_| rng.random_range(1..n)).collect();
                    cases.push(check_instance(n, kappa, epsilon, &freqs)?);
                }
            }
        }
    }
    Ok(cases)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> WeightVector {
    WeightVector::new((0..n).map(|_| rng.random::<f64>()).collect()).expect("finite")
}

/// Parseval, the convolution theorem, inversion and the two triple-sum
/// routes on seeded random vectors of each length.
pub fn fourier_identities(moduli: &[usize], seed: u64) -> Result<Vec<LemmaReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    for &n in moduli {
        let f = random_vector(&mut rng, n);
        let g = random_vector(&mut rng, n);
        let h = random_vector(&mut rng, n);
        let ft = dft(&f);

        let energy: f64 = f.values().iter().map(|v| v * v).sum();
        let spectral: f64 = ft.coefficients().iter().map(Complex64::norm_sqr).sum();
        let parseval = (spectral - n as f64 * energy).abs() / (n as f64 * energy);
        reports.push(LemmaReport::at_most(
            format!("parseval-N{n}"),
            parseval,
            IDENTITY_TOLERANCE,
            Regime::Exact,
        ));

        let back = idft(&ft);
        let inversion = f
            .values()
            .iter()
            .zip(back.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / f.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        reports.push(LemmaReport::at_most(
            format!("inversion-N{n}"),
            inversion,
            IDENTITY_TOLERANCE,
            Regime::Exact,
        ));

        let conv = dft(&convolve(&f, &g)?);
        let gt = dft(&g);
        let scale = ft
            .coefficients()
            .iter()
            .zip(gt.coefficients())
            .map(|(a, b)| (a * b).norm())
            .fold(0.0, f64::max);
        let conv_err = (0..n)
            .map(|r| (conv.coefficients()[r] - ft.coefficients()[r] * gt.coefficients()[r]).norm())
            .fold(0.0, f64::max)
            / scale;
        reports.push(LemmaReport::at_most(
            format!("convolution-N{n}"),
            conv_err,
            IDENTITY_TOLERANCE,
            Regime::Exact,
        ));

        let t = triple_sum(&f, &g, &h)?;
        let rel = t
            .direct
            .map_or(0.0, |d| route_disagreement(d, t.fourier, 0.0));
        reports.push(LemmaReport::at_most(
            format!("triple-sum-routes-N{n}"),
            rel,
            IDENTITY_TOLERANCE,
            Regime::Exact,
        ));
    }
    Ok(reports)
}
