//! Prime generation, primality, and the W-trick parameter chain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::{LemmaReport, Regime};

/// All primes up to `limit`, with O(1) membership.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
    composite: Vec<bool>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Membership for `x <= limit`; values above the limit fall back to
    /// Miller-Rabin.
    pub fn contains(&self, x: u64) -> bool {
        if x > self.limit {
            return is_prime(x);
        }
        x >= 2 && !self.composite[x as usize]
    }

    /// Primes `<= bound`, as a prefix slice.
    pub fn up_to(&self, bound: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= bound);
        &self.primes[..end]
    }
}

/// Sieve of Eratosthenes over `[2, limit]`.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::EmptyRange(limit));
    }
    let size = usize::try_from(limit)
        .ok()
        .and_then(|l| l.checked_add(1))
        .ok_or_else(|| Error::Parameter(format!("sieve limit {limit} too large")))?;
    let mut composite = vec![false; size];
    composite[0] = true;
    composite[1] = true;
    let mut i = 2usize;
    while i * i < size {
        if !composite[i] {
            let mut j = i * i;
            while j < size {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    let primes = composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(p, _)| p as u64)
        .collect();
    Ok(PrimeTable {
        limit,
        primes,
        composite,
    })
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Euler's totient by trial factorisation.
pub fn euler_phi(m: u64) -> u64 {
    let mut rest = m;
    let mut phi = m;
    let mut p = 2u64;
    while p * p <= rest {
        if rest.is_multiple_of(p) {
            while rest.is_multiple_of(p) {
                rest /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if rest > 1 {
        phi -= phi / rest;
    }
    phi
}

/// Parameters of the W-trick: `W` is the primorial of `w`, `M = floor(n/W)`
/// and `N` is the smallest prime in `[(2+kappa)M, (2+2kappa)M]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WTrickParams {
    pub n: u64,
    pub w: u64,
    #[serde(rename = "W")]
    pub modulus: u64,
    #[serde(rename = "M")]
    pub m: u64,
    #[serde(rename = "N")]
    pub big_n: u64,
    pub kappa: f64,
    #[serde(rename = "phi_W")]
    pub phi_w: u64,
}

impl WTrickParams {
    /// Largest integer `W*x + b` touched by the weight `lambda_{b,W,N}`.
    pub fn lambda_reach(&self, b: u64) -> Result<u64> {
        self.modulus
            .checked_mul(self.big_n)
            .and_then(|v| v.checked_add(b))
            .ok_or_else(|| Error::Parameter("W*N + b overflows u64".into()))
    }
}

pub fn build_w_trick(n: u64, w: u64, kappa: f64) -> Result<WTrickParams> {
    if !(kappa > 0.0 && kappa < 0.5) {
        return Err(Error::Parameter(format!(
            "kappa = {kappa} must lie in (0, 1/2)"
        )));
    }
    let mut modulus = 1u64;
    let mut phi_w = 1u64;
    for p in (2..=w).filter(|&p| is_prime(p)) {
        modulus = modulus.checked_mul(p).filter(|&m| m <= n).ok_or_else(|| {
            Error::Parameter(format!("W = product of primes <= {w} exceeds n = {n}"))
        })?;
        phi_w *= p - 1;
    }
    if modulus > n {
        return Err(Error::Parameter(format!("W = {modulus} exceeds n = {n}")));
    }
    let m = n / modulus;
    let lo = ((2.0 + kappa) * m as f64).ceil() as u64;
    let hi = ((2.0 + 2.0 * kappa) * m as f64).floor() as u64;
    let big_n = (lo..=hi).find(|&x| is_prime(x)).ok_or_else(|| {
        Error::Parameter(format!(
            "no prime in [{lo}, {hi}]; increase n or decrease kappa"
        ))
    })?;
    Ok(WTrickParams {
        n,
        w,
        modulus,
        m,
        big_n,
        kappa,
        phi_w,
    })
}

/// `floor(log log n / 4)`, clamped below at 1.
pub fn asymptotic_default_w(n: u64) -> u64 {
    let v = ((n as f64).ln().ln() / 4.0).floor();
    if v.is_finite() && v >= 1.0 {
        v as u64
    } else {
        1
    }
}

/// `C1(k) / (10000 k)` with the recursion-derived `C1(k)`.
pub fn asymptotic_default_kappa(k: u32) -> Result<f64> {
    let c = crate::schur::schur_constants(k)?;
    Ok(c.c1_f64() / (10_000.0 * f64::from(k)))
}

/// `{x in [1, M] : W x + b is prime}` in increasing order.
pub fn residue_class_elements(pt: &PrimeTable, params: &WTrickParams, b: u64) -> Result<Vec<u64>> {
    check_residue(params.modulus, b)?;
    let top = params
        .modulus
        .checked_mul(params.m)
        .and_then(|v| v.checked_add(b))
        .ok_or_else(|| Error::Parameter("W*M + b overflows u64".into()))?;
    if pt.limit() < top {
        return Err(Error::Parameter(format!(
            "prime table limit {} below W*M + b = {top}",
            pt.limit()
        )));
    }
    Ok((1..=params.m)
        .filter(|&x| pt.contains(params.modulus * x + b))
        .collect())
}

pub(crate) fn check_residue(modulus: u64, b: u64) -> Result<()> {
    if gcd(b, modulus) != 1 {
        return Err(Error::InvalidResidue { b, modulus });
    }
    Ok(())
}

/// `sum log p` over primes `p <= n`, `p = b (mod W)`, with the comparison
/// against `(1 - kappa) n / phi(W)`.
pub fn siegel_walfisz_mass(
    pt: &PrimeTable,
    params: &WTrickParams,
    b: u64,
) -> Result<(f64, LemmaReport)> {
    check_residue(params.modulus, b)?;
    if pt.limit() < params.n {
        return Err(Error::Parameter(format!(
            "prime table limit {} below n = {}",
            pt.limit(),
            params.n
        )));
    }
    let target = b % params.modulus;
    let mass: f64 = pt
        .up_to(params.n)
        .iter()
        .filter(|&&p| p % params.modulus == target)
        .map(|&p| (p as f64).ln())
        .sum();
    let bound = (1.0 - params.kappa) * params.n as f64 / params.phi_w as f64;
    let report = LemmaReport::at_least("siegel-walfisz-mass", mass, bound, Regime::Asymptotic);
    Ok((mass, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn small_sieves() {
        assert_eq!(sieve_primes(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
        assert!(matches!(sieve_primes(1), Err(Error::EmptyRange(1))));
    }

    #[test]
    fn sieve_matches_trial_division() {
        let pt = sieve_primes(10_000).unwrap();
        let oracle: Vec<u64> = (2..=10_000).filter(|&n| trial_division(n)).collect();
        assert_eq!(pt.primes(), oracle.as_slice());
        for x in 0..=10_000 {
            assert_eq!(pt.contains(x), trial_division(x), "{x}");
            assert_eq!(is_prime(x), trial_division(x), "{x}");
        }
    }

    #[test]
    fn miller_rabin_large() {
        assert!(is_prime(18_446_744_073_709_551_557)); // largest 64-bit prime
        assert!(!is_prime(18_446_744_073_709_551_559));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2,3,5,7
        assert!(!is_prime(3_825_123_056_546_413_051));
        assert!(is_prime(1_000_000_007));
    }

    #[test]
    fn totient_values() {
        assert_eq!(euler_phi(1), 1);
        assert_eq!(euler_phi(6), 2);
        let brute = (1..=30u64).filter(|&x| gcd(x, 30) == 1).count() as u64;
        assert_eq!(brute, 8);
        assert_eq!(euler_phi(30), brute);
    }

    #[test]
    fn w_trick_examples() {
        let p = build_w_trick(210_000, 5, 0.1).unwrap();
        assert_eq!((p.modulus, p.m, p.phi_w), (30, 7000, 8));
        assert!(p.big_n >= 14_700 && p.big_n <= 15_400);
        assert!(trial_division(p.big_n));
        assert!((14_700..p.big_n).all(|x| !trial_division(x)));

        let p = build_w_trick(100, 2, 0.25).unwrap();
        assert_eq!((p.modulus, p.m, p.big_n), (2, 50, 113));

        assert!(matches!(
            build_w_trick(10, 30, 0.1),
            Err(Error::Parameter(_))
        ));
        assert!(build_w_trick(100, 2, 0.5).is_err());
    }

    #[test]
    fn w_trick_no_prime_in_interval() {
        // M = 1: interval [2.1, 2.2] holds no integer
        let err = build_w_trick(2, 2, 0.1).unwrap_err();
        assert!(err.to_string().contains("increase n"));
    }

    #[test]
    fn residue_classes() {
        let pt = sieve_primes(1000).unwrap();
        let mut p = build_w_trick(100, 2, 0.25).unwrap();
        p.m = 10;
        assert_eq!(
            residue_class_elements(&pt, &p, 1).unwrap(),
            vec![1, 2, 3, 5, 6, 8, 9]
        );
        assert!(matches!(
            residue_class_elements(&pt, &p, 2),
            Err(Error::InvalidResidue { b: 2, modulus: 2 })
        ));

        let mut p = build_w_trick(1000, 5, 0.1).unwrap();
        p.m = 5;
        let oracle: Vec<u64> = (1..=5).filter(|&x| trial_division(30 * x + 1)).collect();
        assert_eq!(oracle, vec![1, 2, 5]);
        assert_eq!(residue_class_elements(&pt, &p, 1).unwrap(), oracle);
    }

    #[test]
    fn mass_sums() {
        let pt = sieve_primes(200).unwrap();
        let p = build_w_trick(100, 2, 0.25).unwrap();
        let (mass, rep) = siegel_walfisz_mass(&pt, &p, 1).unwrap();
        let oracle: f64 = (3..=100u64)
            .filter(|&x| trial_division(x))
            .map(|x| (x as f64).ln())
            .sum();
        assert!((mass - oracle).abs() < 1e-12);
        assert_eq!(rep.bound, 0.75 * 100.0);

        let p = build_w_trick(10, 1, 0.25).unwrap();
        assert_eq!(p.modulus, 1);
        let (mass, _) = siegel_walfisz_mass(&pt, &p, 0).unwrap();
        assert!((mass - 210f64.ln()).abs() < 1e-12);
        assert!((mass - 5.347).abs() < 1e-3);

        // class 1 mod 30 below 31 is empty
        let mut p = build_w_trick(1000, 5, 0.1).unwrap();
        p.n = 30;
        assert_eq!(siegel_walfisz_mass(&pt, &p, 1).unwrap().0, 0.0);
    }

    #[test]
    fn asymptotic_policies() {
        assert_eq!(asymptotic_default_w(1_000_000), 1);
        let kappa = asymptotic_default_kappa(2).unwrap();
        assert!((kappa - 1.0 / 288.0 / 20_000.0).abs() < 1e-15);
    }
}
