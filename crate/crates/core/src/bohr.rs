//! Bohr sets, the smoothing `a_i' = a_i * beta * beta`, and the transference
//! checks that compare the sparse prime functions with their smoothed models.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{dft, EmpiricalConstants, FourierTable, WeightVector};
use crate::primes::WTrickParams;
use crate::report::{LemmaReport, Regime};

/// Representative of `x mod n` in `(-n/2, n/2]`.
pub fn centered(x: u64, n: u64) -> i64 {
    let x = x % n;
    if 2 * x > n {
        x as i64 - n as i64
    } else {
        x as i64
    }
}

/// `||x r / N||` as the exact pair `(min(m, N - m), N)` with `m = x r mod N`.
fn circle_numerator(x: u64, r: u64, n: u64) -> u64 {
    let m = ((x as u128 * r as u128) % n as u128) as u64;
    m.min(n - m)
}

/// `||x r / N||` for residues `x` and `r`.
pub fn circle_distance(x: u64, r: u64, n: u64) -> f64 {
    circle_numerator(x, r, n) as f64 / n as f64
}

fn check_radii(kappa: f64, epsilon: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa < 0.5) {
        return Err(Error::Parameter(format!(
            "kappa = {kappa} must lie in (0, 1/2)"
        )));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Parameter(format!(
            "epsilon = {epsilon} must lie in (0, 1/2)"
        )));
    }
    Ok(())
}

/// `{x : |x| <= kappa N, ||x r / N|| <= 2 epsilon for all r in R}`.
#[derive(Debug, Clone)]
pub struct BohrSet {
    pub modulus: u64,
    pub kappa: f64,
    pub epsilon: f64,
    pub frequencies: Vec<u64>,
    /// Residues in increasing order.
    pub elements: Vec<u64>,
    /// `1_B / |B|`
    pub beta: WeightVector,
}

impl BohrSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u64) -> bool {
        self.elements.binary_search(&(x % self.modulus)).is_ok()
    }
}

fn bohr_member(x: u64, frequencies: &[u64], kappa: f64, epsilon: f64, n: u64) -> bool {
    let rep = centered(x, n).unsigned_abs();
    let radius = 2.0 * epsilon * n as f64;
    rep as f64 <= kappa * n as f64
        && frequencies
            .iter()
            .all(|&r| circle_numerator(x, r, n) as f64 <= radius)
}

pub fn build_bohr_set(frequencies: &[u64], kappa: f64, epsilon: f64, n: u64) -> Result<BohrSet> {
    check_radii(kappa, epsilon)?;
    if n < 2 {
        return Err(Error::Parameter(format!("modulus N = {n} too small")));
    }
    let elements: Vec<u64> = (0..n)
        .into_par_iter()
        .filter(|&x| bohr_member(x, frequencies, kappa, epsilon, n))
        .collect();
    if elements.first() != Some(&0) {
        return Err(Error::Numeric("0 is missing from the Bohr set".into()));
    }
    if let Some(&x) = elements
        .iter()
        .find(|&&x| elements.binary_search(&((n - x) % n)).is_err())
    {
        return Err(Error::Numeric(format!("Bohr set not symmetric at {x}")));
    }
    let mut beta = vec![0.0; n as usize];
    let weight = 1.0 / elements.len() as f64;
    for &x in &elements {
        beta[x as usize] = weight;
    }
    Ok(BohrSet {
        modulus: n,
        kappa,
        epsilon,
        frequencies: frequencies.to_vec(),
        elements,
        beta: WeightVector::new(beta)?,
    })
}

/// `|B| >= epsilon^|R| kappa N`
pub fn bohr_size_lemma(b: &BohrSet) -> LemmaReport {
    let bound = b.epsilon.powi(b.frequencies.len() as i32) * b.kappa * b.modulus as f64;
    LemmaReport::at_least("bohr-size", b.len() as f64, bound, Regime::Exact)
}

/// The fullest cell of the partition of `[-kappa N / 2, kappa N / 2]` by the
/// boxes `t_j / d <= {x r_j / N} < (t_j + 1) / d`, `d = floor(1 / epsilon)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoxWitness {
    pub d: u64,
    pub box_index: Vec<u64>,
    /// Box members as integers in `[-kappa N / 2, kappa N / 2]`.
    pub elements: Vec<i64>,
    pub x0: i64,
    /// Number of integers in the half-width interval.
    pub points: u64,
    /// `d^-|R|` times `points`.
    pub required: f64,
    /// Every `x - x0` for `x` in the box lies in the Bohr set.
    pub translation_verified: bool,
}

pub fn pigeonhole_box_witness(
    frequencies: &[u64],
    kappa: f64,
    epsilon: f64,
    n: u64,
) -> Result<BoxWitness> {
    check_radii(kappa, epsilon)?;
    let d = (1.0 / epsilon).floor() as u64;
    if d < 2 {
        return Err(Error::Parameter(format!(
            "d = floor(1/epsilon) = {d} below 2"
        )));
    }
    let half = (kappa * n as f64 / 2.0).floor() as i64;
    let mut boxes: BTreeMap<Vec<u64>, Vec<i64>> = BTreeMap::new();
    for x in -half..=half {
        let residue = x.rem_euclid(n as i64) as u64;
        let index: Vec<u64> = frequencies
            .iter()
            .map(|&r| {
                let m = residue as u128 * r as u128 % n as u128;
                (m * d as u128 / n as u128) as u64
            })
            .collect();
        boxes.entry(index).or_default().push(x);
    }
    // fullest box, lexicographically smallest index on ties
    let (box_index, elements) = boxes
        .into_iter()
        .fold(None::<(Vec<u64>, Vec<i64>)>, |best, cand| match best {
            Some(b) if b.1.len() >= cand.1.len() => Some(b),
            _ => Some(cand),
        })
        .expect("interval contains 0");
    let x0 = elements[0];
    let translation_verified = elements.iter().all(|&x| {
        let diff = (x - x0).rem_euclid(n as i64) as u64;
        bohr_member(diff, frequencies, kappa, epsilon, n)
    });
    let points = (2 * half + 1) as u64;
    Ok(BoxWitness {
        d,
        required: (d as f64).powi(-(frequencies.len() as i32)) * points as f64,
        box_index,
        elements,
        x0,
        points,
        translation_verified,
    })
}

/// Sparse cyclic convolution; entries outside the sum of supports stay
/// exactly zero.
fn sparse_convolve(f: &WeightVector, g: &WeightVector) -> WeightVector {
    let n = f.modulus();
    let gs: Vec<(usize, f64)> = g
        .support()
        .into_iter()
        .map(|y| (y, g.values()[y]))
        .collect();
    let mut out = vec![0.0; n];
    for x in f.support() {
        let fx = f.values()[x];
        for &(y, gy) in &gs {
            let z = if x + y >= n { x + y - n } else { x + y };
            out[z] += fx * gy;
        }
    }
    WeightVector::new(out).expect("finite inputs")
}

/// `beta * beta`
pub fn smoothing_kernel(bohr: &BohrSet) -> WeightVector {
    sparse_convolve(&bohr.beta, &bohr.beta)
}

/// `a * beta * beta`, evaluated as `a * (beta * beta)`.
pub fn smooth(a: &WeightVector, beta: &WeightVector) -> Result<WeightVector> {
    if a.modulus() != beta.modulus() {
        return Err(Error::Dimension {
            left: a.modulus(),
            right: beta.modulus(),
        });
    }
    let kernel = sparse_convolve(beta, beta);
    Ok(sparse_convolve(a, &kernel))
}

/// Smooths every function against one precomputed kernel.
pub fn smooth_all(a: &[WeightVector], bohr: &BohrSet) -> Result<Vec<WeightVector>> {
    if let Some(f) = a.iter().find(|f| f.modulus() as u64 != bohr.modulus) {
        return Err(Error::Dimension {
            left: f.modulus(),
            right: bohr.modulus as usize,
        });
    }
    let kernel = smoothing_kernel(bohr);
    Ok(a.par_iter().map(|f| sparse_convolve(f, &kernel)).collect())
}

pub const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmoothingCheck {
    /// Largest `|sum a_i' - sum a_i|` over the family.
    pub mass_drift: f64,
    /// Residues in the support window `[-2 kappa N, M + 2 kappa N]`.
    pub window: (i64, i64),
    /// Support entries found outside the window (should be none).
    pub outside_support: Vec<u64>,
}

impl SmoothingCheck {
    pub fn holds(&self) -> bool {
        self.mass_drift <= MASS_TOLERANCE && self.outside_support.is_empty()
    }
}

/// Mass preservation and the support window of each smoothed function.
pub fn check_smoothing(
    a: &[WeightVector],
    smoothed: &[WeightVector],
    params: &WTrickParams,
) -> SmoothingCheck {
    let n = params.big_n;
    let reach = (2.0 * params.kappa * n as f64).floor() as u64;
    let span = params.m + 2 * reach;
    let in_window = |x: u64| span + 1 >= n || (x + reach) % n <= span;
    let mut mass_drift = 0.0f64;
    let mut outside = Vec::new();
    for (f, g) in a.iter().zip(smoothed) {
        mass_drift = mass_drift.max((f.sum() - g.sum()).abs());
        outside.extend(
            g.support()
                .into_iter()
                .map(|x| x as u64)
                .filter(|&x| !in_window(x)),
        );
    }
    outside.sort_unstable();
    outside.dedup();
    SmoothingCheck {
        mass_drift,
        window: (-(reach as i64), (params.m + reach) as i64),
        outside_support: outside,
    }
}

/// Checks `sup_x a_0'(x) <= (1 + 3 kappa) / N` and, separately, its
/// hypothesis `epsilon^|R| >= kappa^-2 log log w / w`.
pub fn upper_lemma(
    a0_prime: &WeightVector,
    params: &WTrickParams,
    w: u64,
    bohr: &BohrSet,
) -> Vec<LemmaReport> {
    let kappa = params.kappa;
    let wf = w as f64;
    let hyp_rhs = wf.ln().ln() / wf / (kappa * kappa);
    let hyp_lhs = bohr.epsilon.powi(bohr.frequencies.len() as i32);
    let mut hypothesis =
        LemmaReport::at_least("upper-hypothesis", hyp_lhs, hyp_rhs, Regime::Asymptotic);
    if !hyp_rhs.is_finite() {
        hypothesis =
            LemmaReport::at_least("upper-hypothesis", hyp_lhs, f64::MAX, Regime::Asymptotic)
                .with_flag(format!("log log w undefined for w = {w}"));
    }
    vec![
        hypothesis,
        LemmaReport::at_most(
            "upper",
            a0_prime.max(),
            (1.0 + 3.0 * kappa) / params.big_n as f64,
            Regime::Asymptotic,
        ),
    ]
}

/// `beta~(r)` evaluated directly over the Bohr set.
pub fn beta_coefficient(bohr: &BohrSet, r: u64) -> Complex64 {
    let n = bohr.modulus;
    let mut acc = Complex64::new(0.0, 0.0);
    for &x in &bohr.elements {
        let m = (x as u128 * r as u128 % n as u128) as f64;
        acc += Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * m / n as f64);
    }
    acc / bohr.len() as f64
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetaFrequency {
    pub r: u64,
    /// `|1 - beta~(r)|`
    pub first_order: f64,
    /// `|1 - beta~(r)^4 beta~(-r)^2|`
    pub sixth_power: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BetaCheck {
    pub per_frequency: Vec<BetaFrequency>,
    pub reports: Vec<LemmaReport>,
}

/// `|1 - beta~(r)| <= 64 eps^2` and `|1 - beta~(r)^4 beta~(-r)^2| <= 384 eps^2`
/// for every `r` in `R`; reports carry the worst frequency.
pub fn beta_lemma(bohr: &BohrSet) -> BetaCheck {
    let n = bohr.modulus;
    let per_frequency: Vec<BetaFrequency> = bohr
        .frequencies
        .par_iter()
        .map(|&r| {
            let plus = beta_coefficient(bohr, r);
            let minus = beta_coefficient(bohr, (n - r % n) % n);
            let one = Complex64::new(1.0, 0.0);
            BetaFrequency {
                r,
                first_order: (one - plus).norm(),
                sixth_power: (one - plus.powu(4) * minus.powu(2)).norm(),
            }
        })
        .collect();
    let eps2 = bohr.epsilon * bohr.epsilon;
    let worst_first = per_frequency
        .iter()
        .map(|f| f.first_order)
        .fold(0.0, f64::max);
    let worst_sixth = per_frequency
        .iter()
        .map(|f| f.sixth_power)
        .fold(0.0, f64::max);
    BetaCheck {
        reports: vec![
            LemmaReport::at_most("beta-first-order", worst_first, 64.0 * eps2, Regime::Exact),
            LemmaReport::at_most("beta", worst_sixth, 384.0 * eps2, Regime::Exact),
        ],
        per_frequency,
    }
}

pub const TRIPLE_SUM_TOLERANCE: f64 = 1e-9;
/// Largest `N` for which the dense `O(N^2)` direct route runs.
pub const DENSE_DIRECT_LIMIT: usize = 2048;
/// Largest `|supp f1| |supp f2|` for which the sparse direct route runs.
pub const SPARSE_DIRECT_BUDGET: usize = 400_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleSum {
    pub fourier: f64,
    pub direct: Option<f64>,
}

impl TripleSum {
    pub fn value(&self) -> f64 {
        self.direct.unwrap_or(self.fourier)
    }
}

/// `N^-1 sum_r f1~(r) f2~(r) f3~(-r)`, real part.
pub fn triple_sum_fourier(t1: &FourierTable, t2: &FourierTable, t3: &FourierTable) -> f64 {
    let n = t1.modulus() as i64;
    (0..n)
        .map(|r| (t1.at(r) * t2.at(r) * t3.at(-r)).re)
        .sum::<f64>()
        / n as f64
}

/// `sum_{x + y = z} f1(x) f2(y) f3(z)` by the double loop over supports.
pub fn triple_sum_direct(f1: &WeightVector, f2: &WeightVector, f3: &WeightVector) -> f64 {
    let n = f1.modulus();
    let s2: Vec<(usize, f64)> = f2
        .support()
        .into_iter()
        .map(|y| (y, f2.values()[y]))
        .collect();
    f1.support()
        .par_iter()
        .map(|&x| {
            let fx = f1.values()[x];
            s2.iter()
                .map(|&(y, fy)| {
                    let z = if x + y >= n { x + y - n } else { x + y };
                    fx * fy * f3.values()[z]
                })
                .sum::<f64>()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum()
}

/// Scale of the transform route's rounding: `N^-1 sum_r |f1~ f2~ f3~|`.
fn fourier_scale(t1: &FourierTable, t2: &FourierTable, t3: &FourierTable) -> f64 {
    let n = t1.modulus() as i64;
    (0..n)
        .map(|r| t1.at(r).norm() * t2.at(r).norm() * t3.at(-r).norm())
        .sum::<f64>()
        / n as f64
}

/// Relative disagreement of the two routes. When the direct sum is exactly
/// zero the transform value is measured against its own rounding scale
/// `N^-1 sum_r |f1~ f2~ f3~|` instead.
pub fn route_disagreement(direct: f64, fourier: f64, scale: f64) -> f64 {
    let denom = if direct == 0.0 {
        scale
    } else {
        direct.abs().max(fourier.abs())
    };
    if denom == 0.0 {
        fourier.abs()
    } else {
        (direct - fourier).abs() / denom
    }
}

/// Both routes where affordable; errors when they disagree beyond
/// [`TRIPLE_SUM_TOLERANCE`].
pub fn triple_sum(f1: &WeightVector, f2: &WeightVector, f3: &WeightVector) -> Result<TripleSum> {
    let n = f1.modulus();
    for g in [f2, f3] {
        if g.modulus() != n {
            return Err(Error::Dimension {
                left: n,
                right: g.modulus(),
            });
        }
    }
    let (t1, t2, t3) = (dft(f1), dft(f2), dft(f3));
    let fourier = triple_sum_fourier(&t1, &t2, &t3);
    let affordable = n <= DENSE_DIRECT_LIMIT
        || f1.support().len().saturating_mul(f2.support().len()) <= SPARSE_DIRECT_BUDGET;
    let direct = affordable.then(|| triple_sum_direct(f1, f2, f3));
    if let Some(d) = direct {
        let rel = route_disagreement(d, fourier, fourier_scale(&t1, &t2, &t3));
        if rel > TRIPLE_SUM_TOLERANCE {
            return Err(Error::Numeric(format!(
                "triple sum routes disagree: direct {d:e}, fourier {fourier:e} (relative {rel:e})"
            )));
        }
    }
    Ok(TripleSum { fourier, direct })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DifferenceCheck {
    /// `sum_i T(a_i, a_i, a_i)`
    pub original: f64,
    /// `sum_i T(a_i', a_i', a_i')`
    pub smoothed: f64,
    pub c3: f64,
    pub report: LemmaReport,
}

/// `|sum_i T(a_i) - sum_i T(a_i')| <= C3 k^2 / N (eps^2 delta^-3 + delta^(1/3))`
/// where `T(f) = sum_{x+y=z} f(x) f(y) f(z)`.
pub fn difference_lemma(
    original: f64,
    smoothed: f64,
    n: u64,
    delta: f64,
    epsilon: f64,
    k: usize,
    constants: &EmpiricalConstants,
) -> DifferenceCheck {
    let c3 = constants.c3();
    let bound = c3 * (k * k) as f64 / n as f64 * (epsilon * epsilon / delta.powi(3) + delta.cbrt());
    DifferenceCheck {
        original,
        smoothed,
        c3,
        report: LemmaReport::at_most(
            "difference",
            (original - smoothed).abs(),
            bound,
            Regime::Asymptotic,
        )
        .with_flag("uses empirical C2(3), C2(5/2)"),
    }
}

/// Sum of the per-color smoothed triple sums through the transform route.
pub fn smoothed_triple_total(smoothed: &[WeightVector]) -> f64 {
    smoothed
        .par_iter()
        .map(|f| {
            let t = dft(f);
            triple_sum_fourier(&t, &t, &t)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseModel {
    /// `X = {x : a_0'(x) >= kappa / N}`
    pub x_set: Vec<u64>,
    /// `A_0' = X intersected with [1, M]`
    pub a0_prime: Vec<u64>,
    /// `A_1', ..., A_k'`
    pub partition: Vec<Vec<u64>>,
    pub reports: Vec<LemmaReport>,
}

/// Thresholds the smoothed total, keeps `[1, M]`, and assigns each point to
/// the color whose smoothed function is largest there (lowest color on ties).
/// `a0_prime` must equal the color-ordered sum of `smoothed`.
pub fn extract_dense_model(
    a0_prime: &WeightVector,
    smoothed: &[WeightVector],
    params: &WTrickParams,
) -> Result<DenseModel> {
    let n = params.big_n;
    let k = smoothed.len();
    let kappa = params.kappa;
    let threshold = kappa / n as f64;
    let x_set: Vec<u64> = (0..n)
        .filter(|&x| a0_prime.values()[x as usize] >= threshold)
        .collect();
    let a0p: Vec<u64> = x_set
        .iter()
        .copied()
        .filter(|&x| (1..=params.m).contains(&x))
        .collect();

    let mut partition = vec![Vec::new(); k];
    let floor = kappa / (k as f64 * n as f64);
    for &x in &a0p {
        let mut best = 0usize;
        for i in 1..k {
            if smoothed[i].values()[x as usize] > smoothed[best].values()[x as usize] {
                best = i;
            }
        }
        let value = smoothed[best].values()[x as usize];
        if value < floor {
            return Err(Error::Numeric(format!(
                "a_{}'({x}) = {value:e} below kappa/(kN) = {floor:e}",
                best + 1
            )));
        }
        partition[best].push(x);
    }
    let covered: usize = partition.iter().map(Vec::len).sum();
    if covered != a0p.len() {
        return Err(Error::Partition(0));
    }
    let nf = n as f64;
    let mf = params.m as f64;
    let reports = vec![
        LemmaReport::at_least(
            "dense-set-X",
            x_set.len() as f64,
            (0.5 - 6.0 * kappa) * nf,
            Regime::Asymptotic,
        ),
        LemmaReport::at_least(
            "dense-set-A0'",
            a0p.len() as f64,
            (1.0 - 20.0 * kappa) * mf,
            Regime::Asymptotic,
        ),
    ];
    Ok(DenseModel {
        x_set,
        a0_prime: a0p,
        partition,
        reports,
    })
}
