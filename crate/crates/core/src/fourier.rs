//! Discrete Fourier analysis on `Z_N`: transforms, cyclic convolution, the
//! logarithmic prime weight, the functions `a_i`, restriction sums and the
//! large spectrum.
//!
//! Sign convention: `f~(r) = sum_x f(x) e(-x r / N)` with `e(t) = exp(2 pi i t)`.

use std::cell::RefCell;
use std::collections::BTreeMap;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::coloring::Color;
use crate::error::{Error, Result};
use crate::primes::{check_residue, is_prime, WTrickParams};
use crate::report::{LemmaReport, Regime};

/// A real function on `Z_N`, stored by residue `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    values: Vec<f64>,
}

impl WeightVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Parameter("weight vector needs N >= 1".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("non-finite value at index {i}")));
        }
        Ok(WeightVector { values })
    }

    pub fn zeros(n: usize) -> Self {
        WeightVector {
            values: vec![0.0; n.max(1)],
        }
    }

    /// Point mass `value` at residue `at`.
    pub fn point(n: usize, at: usize, value: f64) -> Self {
        let mut w = Self::zeros(n);
        w.values[at % n] = value;
        w
    }

    pub fn modulus(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn get(&self, x: i64) -> f64 {
        self.values[x.rem_euclid(self.values.len() as i64) as usize]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Residues carrying a nonzero value.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len())
            .filter(|&i| self.values[i] != 0.0)
            .collect()
    }

    fn check_same(&self, other: &WeightVector) -> Result<()> {
        if self.modulus() != other.modulus() {
            return Err(Error::Dimension {
                left: self.modulus(),
                right: other.modulus(),
            });
        }
        Ok(())
    }
}

/// Coefficients `f~(r)` for `r` in `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierTable {
    coefficients: Vec<Complex64>,
}

impl FourierTable {
    pub fn modulus(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Coefficient at `r`, reduced mod N (negative `r` allowed).
    pub fn at(&self, r: i64) -> Complex64 {
        self.coefficients[r.rem_euclid(self.coefficients.len() as i64) as usize]
    }
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place forward transform (negative exponent), no normalisation.
pub(crate) fn fft_forward(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

/// In-place inverse transform (positive exponent), no normalisation.
pub(crate) fn fft_inverse(buf: &mut [Complex64]) {
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()));
    fft.process(buf);
}

pub fn dft(f: &WeightVector) -> FourierTable {
    let mut buf: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_forward(&mut buf);
    FourierTable { coefficients: buf }
}

/// Inverse transform `f(x) = N^-1 sum_r F(r) e(x r / N)`, real part.
pub fn idft(table: &FourierTable) -> WeightVector {
    let n = table.modulus();
    let mut buf = table.coefficients.clone();
    fft_inverse(&mut buf);
    WeightVector {
        values: buf.iter().map(|c| c.re / n as f64).collect(),
    }
}

/// Cyclic convolution `(f*g)(x) = sum_y f(y) g(x - y)`.
pub fn convolve(f: &WeightVector, g: &WeightVector) -> Result<WeightVector> {
    f.check_same(g)?;
    let ft = dft(f);
    let gt = dft(g);
    let product = FourierTable {
        coefficients: ft
            .coefficients
            .iter()
            .zip(&gt.coefficients)
            .map(|(a, b)| a * b)
            .collect(),
    };
    Ok(idft(&product))
}

/// `lambda_{b,W,N}(x) = phi(W) log(W x + b) / (W N)` when `1 <= x < N` and
/// `W x + b` is prime, 0 otherwise.
pub fn lambda_weight(params: &WTrickParams, b: u64) -> Result<WeightVector> {
    check_residue(params.modulus, b)?;
    params.lambda_reach(b)?;
    let big_n = params.big_n as usize;
    let scale = params.phi_w as f64 / (params.modulus as f64 * params.big_n as f64);
    let mut values = vec![0.0; big_n];
    for (x, slot) in values.iter_mut().enumerate().skip(1) {
        let v = params.modulus * x as u64 + b;
        if is_prime(v) {
            *slot = scale * (v as f64).ln();
        }
    }
    WeightVector::new(values)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaMass {
    /// `sum_{1 <= x <= M} lambda(x)`
    pub up_to_m: f64,
    /// `sum_x lambda(x)` over all of `Z_N`
    pub total: f64,
}

/// Mass of the weight on `[1, M]` and overall, with the comparisons against
/// `(1 - kappa) M / N` and `1/2 - 3 kappa`.
pub fn lambda_mass(lambda: &WeightVector, params: &WTrickParams) -> (LambdaMass, Vec<LemmaReport>) {
    let up_to_m: f64 = lambda.values()[1..=params.m as usize].iter().sum();
    let total = lambda.sum();
    let kappa = params.kappa;
    let reports = vec![
        LemmaReport::at_least(
            "lambda-mass-vs-M/N",
            up_to_m,
            (1.0 - kappa) * params.m as f64 / params.big_n as f64,
            Regime::Asymptotic,
        ),
        LemmaReport::at_least(
            "lambda-mass-half",
            up_to_m,
            0.5 - 3.0 * kappa,
            Regime::Asymptotic,
        ),
    ];
    (LambdaMass { up_to_m, total }, reports)
}

/// The weighted class indicators `a_i = 1_{A_i} lambda`.
#[derive(Debug, Clone)]
pub struct AFunctions {
    /// `a_0 = 1_{A_0} lambda` with `A_0` the union of the classes.
    pub total: WeightVector,
    /// `a_1, ..., a_k`.
    pub per_color: Vec<WeightVector>,
}

/// Builds `a_0, a_1, ..., a_k` from disjoint classes `A_1..A_k` inside
/// `[1, M]` and verifies `a_0 = a_1 + ... + a_k` pointwise.
pub fn build_a_functions(
    classes: &[Vec<u64>],
    lambda: &WeightVector,
    m: u64,
) -> Result<AFunctions> {
    let n = lambda.modulus();
    let mut owner = vec![0 as Color; n];
    for (i, class) in classes.iter().enumerate() {
        for &x in class {
            if x < 1 || x > m || x as usize >= n {
                return Err(Error::Domain(format!("{x} outside [1, M = {m}]")));
            }
            if owner[x as usize] != 0 {
                return Err(Error::Partition(x));
            }
            owner[x as usize] = (i + 1) as Color;
        }
    }
    let per_color: Vec<WeightVector> = (1..=classes.len())
        .map(|c| WeightVector {
            values: (0..n)
                .map(|x| {
                    if owner[x] as usize == c {
                        lambda.values[x]
                    } else {
                        0.0
                    }
                })
                .collect(),
        })
        .collect();
    let total = WeightVector {
        values: (0..n)
            .map(|x| if owner[x] != 0 { lambda.values[x] } else { 0.0 })
            .collect(),
    };
    for x in 0..n {
        let summed: f64 = per_color.iter().map(|a| a.values[x]).sum();
        if summed != total.values[x] {
            return Err(Error::Numeric(format!("a_0 != sum a_i at x = {x}")));
        }
    }
    Ok(AFunctions { total, per_color })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumWitness {
    pub color: Color,
    pub magnitude: f64,
}

/// `R = {r : max_i |a_i~(r)| >= delta}` with the maximising color per frequency.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub delta: f64,
    pub frequencies: Vec<u64>,
    pub witnesses: BTreeMap<u64, SpectrumWitness>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }
}

pub fn large_spectrum(a: &[WeightVector], delta: f64) -> Result<Spectrum> {
    let tables: Vec<FourierTable> = a.iter().map(dft).collect();
    large_spectrum_from_tables(&tables, delta)
}

pub fn large_spectrum_from_tables(tables: &[FourierTable], delta: f64) -> Result<Spectrum> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta = {delta} must lie in (0, 1)")));
    }
    let Some(first) = tables.first() else {
        return Err(Error::Parameter("large spectrum of an empty family".into()));
    };
    let n = first.modulus();
    if let Some(t) = tables.iter().find(|t| t.modulus() != n) {
        return Err(Error::Dimension {
            left: n,
            right: t.modulus(),
        });
    }
    let mut frequencies = Vec::new();
    let mut witnesses = BTreeMap::new();
    for r in 0..n {
        let (color, magnitude) = max_magnitude(tables, r);
        if magnitude >= delta {
            frequencies.push(r as u64);
            witnesses.insert(r as u64, SpectrumWitness { color, magnitude });
        }
    }
    Ok(Spectrum {
        delta,
        frequencies,
        witnesses,
    })
}

/// `(argmax color, max_i |a_i~(r)|)`, lowest color on ties.
pub fn max_magnitude(tables: &[FourierTable], r: usize) -> (Color, f64) {
    let mut best = (1 as Color, f64::NEG_INFINITY);
    for (i, t) in tables.iter().enumerate() {
        let m = t.coefficients[r].norm();
        if m > best.1 {
            best = ((i + 1) as Color, m);
        }
    }
    best
}

/// `|R| <= C2(3) delta^-3 k`, with the empirical `C2(3)`.
pub fn spectrum_size_report(spectrum: &Spectrum, c2_3: f64, k: usize) -> LemmaReport {
    LemmaReport::at_most(
        "spectrum-size",
        spectrum.len() as f64,
        c2_3 * spectrum.delta.powi(-3) * k as f64,
        Regime::Exact,
    )
    .with_flag("uses empirical C2(3)")
}

/// `sum_r |a~(r)|^rho` for `rho > 2`.
pub fn restriction_sum(a: &WeightVector, rho: f64) -> Result<f64> {
    restriction_sum_table(&dft(a), rho)
}

pub fn restriction_sum_table(table: &FourierTable, rho: f64) -> Result<f64> {
    if rho.is_nan() || rho <= 2.0 {
        return Err(Error::Domain(format!(
            "restriction exponent rho = {rho} must exceed 2"
        )));
    }
    Ok(table.coefficients.iter().map(|c| c.norm().powf(rho)).sum())
}

/// Empirical stand-ins for the restriction constants `C2(3)` and `C2(5/2)`:
/// the largest observed restriction sums.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalConstants {
    pub c2_3: f64,
    pub c2_5_2: f64,
}

impl EmpiricalConstants {
    pub fn from_tables(tables: &[FourierTable]) -> Result<Self> {
        let mut c = EmpiricalConstants {
            c2_3: 0.0,
            c2_5_2: 0.0,
        };
        for t in tables {
            c.c2_3 = c.c2_3.max(restriction_sum_table(t, 3.0)?);
            c.c2_5_2 = c.c2_5_2.max(restriction_sum_table(t, 2.5)?);
        }
        Ok(c)
    }

    /// Keeps the larger entry of each constant.
    pub fn merge(self, other: EmpiricalConstants) -> Self {
        EmpiricalConstants {
            c2_3: self.c2_3.max(other.c2_3),
            c2_5_2: self.c2_5_2.max(other.c2_5_2),
        }
    }

    /// `C3 = 384 C2(3) + 2 C2(5/2)^(2/3) C2(3)^(1/3)`
    pub fn c3(&self) -> f64 {
        384.0 * self.c2_3 + 2.0 * self.c2_5_2.powf(2.0 / 3.0) * self.c2_3.powf(1.0 / 3.0)
    }
}

/// `sup_{r != 0} |lambda~(r)|` and its comparison with `2 log log w / w`.
pub fn sup_offzero_lambda(lambda: &WeightVector, w: u64) -> (f64, LemmaReport) {
    let table = dft(lambda);
    let sup = table.coefficients[1..]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let wf = w as f64;
    let bound = 2.0 * wf.ln().ln() / wf;
    let mut report =
        LemmaReport::at_most("lambda-fourier-uniformity", sup, bound, Regime::Asymptotic);
    if !bound.is_finite() {
        report = LemmaReport::at_most(
            "lambda-fourier-uniformity",
            sup,
            f64::MIN,
            Regime::Asymptotic,
        )
        .with_flag(format!("threshold undefined for w = {w}"));
    }
    (sup, report)
}
