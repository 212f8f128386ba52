//! Slow, independent reimplementations used to cross-check the library.
#![allow(dead_code)]

use std::collections::{HashMap, HashSet};
use std::f64::consts::TAU;

pub fn trial_division(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Odd-only sieve; a different layout from the library's.
pub fn reference_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let half = (limit as usize).div_ceil(2);
    let mut odd_composite = vec![false; half];
    let mut i = 1;
    while (2 * i + 1) * (2 * i + 1) <= limit as usize {
        if !odd_composite[i] {
            let p = 2 * i + 1;
            let mut j = p * p / 2;
            while j < half {
                odd_composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut out = vec![2];
    out.extend(
        (1..half)
            .filter(|&i| !odd_composite[i])
            .map(|i| 2 * i as u64 + 1),
    );
    out
}

pub fn phi_by_gcd(m: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..=m).filter(|&x| gcd(x, m) == 1).count() as u64
}

/// `sum_x f(x) e(-x r / N)` as `(re, im)`, straight from the definition.
pub fn dft_direct(f: &[f64]) -> Vec<(f64, f64)> {
    let n = f.len();
    (0..n)
        .map(|r| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (x, &v) in f.iter().enumerate() {
                let angle = -TAU * ((x * r) % n) as f64 / n as f64;
                re += v * angle.cos();
                im += v * angle.sin();
            }
            (re, im)
        })
        .collect()
}

/// `sum_{x + y = z (mod N)} f(x) g(y) h(z)` by the double loop.
pub fn triple_sum_direct(f: &[f64], g: &[f64], h: &[f64]) -> f64 {
    let n = f.len();
    let mut total = 0.0;
    for x in 0..n {
        for y in 0..n {
            total += f[x] * g[y] * h[(x + y) % n];
        }
    }
    total
}

/// Ordered pairs `(x, y)` with `x + y = z` all in one class of `[1, n]`.
/// `labels[x]` is the color of `x`, index 0 unused.
pub fn schur_count_direct(labels: &[u16], n: usize) -> u64 {
    let mut total = 0;
    for x in 1..=n {
        for y in 1..=n - x {
            if labels[x] == labels[y] && labels[y] == labels[x + y] {
                total += 1;
            }
        }
    }
    total
}

/// `sum over monochromatic (x, y), x + y <= n, of (n + 1 - x - y)`.
pub fn correspondence_sum(labels: &[u16], n: usize) -> u64 {
    let mut total = 0;
    for x in 1..=n {
        for y in 1..=n - x {
            if labels[x] == labels[y] && labels[y] == labels[x + y] {
                total += (n + 1 - x - y) as u64;
            }
        }
    }
    total
}

/// All `(p1, p2, p3, color)` with `p1 <= p2`, `p1 + p2 = p3 + 1`, `p3 <= n`,
/// one color, via hash lookups.
pub fn hash_set_witnesses(colors: &HashMap<u64, u16>, n: u64) -> Vec<(u64, u64, u64, u16)> {
    let primes: HashSet<u64> = colors.keys().copied().filter(|&p| p <= n).collect();
    let mut sorted: Vec<u64> = primes.iter().copied().collect();
    sorted.sort_unstable();
    let mut out = Vec::new();
    for (i, &p1) in sorted.iter().enumerate() {
        for &p2 in &sorted[i..] {
            let p3 = p1 + p2 - 1;
            if p3 > n {
                break;
            }
            if primes.contains(&p3) && colors[&p1] == colors[&p2] && colors[&p2] == colors[&p3] {
                out.push((p1, p2, p3, colors[&p1]));
            }
        }
    }
    out.sort_by_key(|&(p1, _, p3, _)| (p3, p1));
    out
}

/// Brute-force Bohr membership: `|x| <= kappa N` and `||x r / N|| <= 2 eps`.
pub fn bohr_scan(freqs: &[u64], kappa: f64, epsilon: f64, n: u64) -> Vec<u64> {
    (0..n)
        .filter(|&x| {
            let c = if x <= n / 2 {
                x as f64
            } else {
                x as f64 - n as f64
            };
            c.abs() <= kappa * n as f64
                && freqs.iter().all(|&r| {
                    let t = ((x as u128 * r as u128) % n as u128) as u64;
                    t.min(n - t) as f64 <= 2.0 * epsilon * n as f64
                })
        })
        .collect()
}

/// `beta~(r)` for `beta = 1_B / |B|`, summed straight from the set.
pub fn beta_hat(set: &[u64], r: u64, n: u64) -> (f64, f64) {
    let mut re = 0.0;
    let mut im = 0.0;
    for &x in set {
        let angle = -TAU * ((x as u128 * r as u128) % n as u128) as f64 / n as f64;
        re += angle.cos();
        im += angle.sin();
    }
    (re / set.len() as f64, im / set.len() as f64)
}
