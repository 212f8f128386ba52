//! Exhaustive search for monochromatic `p1 + p2 = p3 + 1` and for the
//! three-term version of the progression conjecture.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coloring::{Color, Coloring, Domain};
use crate::error::{Error, Result};
use crate::primes::PrimeTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Witness {
    pub p1: u64,
    pub p2: u64,
    pub p3: u64,
    pub color: Color,
    /// `p1, p2, p3` pairwise different.
    pub distinct: bool,
}

impl Witness {
    pub fn new(p1: u64, p2: u64, p3: u64, color: Color) -> Self {
        Witness {
            p1,
            p2,
            p3,
            color,
            distinct: p1 != p2 && p1 != p3 && p2 != p3,
        }
    }

    /// Re-checks primality, the identity and the common color.
    pub fn certify(&self, c: &Coloring) -> bool {
        use crate::primes::is_prime;
        [self.p1, self.p2, self.p3].iter().all(|&p| is_prime(p))
            && self.p1 + self.p2 == self.p3 + 1
            && [self.p1, self.p2, self.p3]
                .iter()
                .all(|&p| c.color(p) == Some(self.color))
            && self.distinct == (self.p1 != self.p2 && self.p1 != self.p3 && self.p2 != self.p3)
    }
}

fn prime_domain(pt: &PrimeTable, c: &Coloring) -> Result<u64> {
    let Domain::PrimesUpTo(n) = c.domain() else {
        return Err(Error::Domain(
            "witness search needs a coloring of primes".into(),
        ));
    };
    if pt.limit() < n {
        return Err(Error::Parameter(format!(
            "prime table limit {} below coloring bound {n}",
            pt.limit()
        )));
    }
    Ok(n)
}

/// The colored primes up to a bound, split by color.
struct ClassIndex<'a> {
    labels: &'a [Color],
    classes: Vec<Vec<u64>>,
}

impl<'a> ClassIndex<'a> {
    fn new(primes: &[u64], labels: &'a [Color], k: Color) -> Self {
        let mut classes = vec![Vec::new(); k as usize + 1];
        for &p in primes {
            classes[labels[p as usize] as usize].push(p);
        }
        ClassIndex { labels, classes }
    }

    /// Calls `f` on every witness for one value of `p3`, in increasing `p1`.
    /// Labels are zero off the colored primes, so a label match certifies
    /// primality as well as color.
    fn for_each_at(&self, p3: u64, mut f: impl FnMut(Witness)) {
        let color = self.labels[p3 as usize];
        if color == 0 {
            return;
        }
        let sum = p3 + 1;
        let class = &self.classes[color as usize];
        let end = class.partition_point(|&p| p <= sum / 2);
        for &p1 in &class[..end] {
            if self.labels[(sum - p1) as usize] == color {
                f(Witness::new(p1, sum - p1, p3, color));
            }
        }
    }

    fn witnesses_at(&self, p3: u64) -> Vec<Witness> {
        let mut out = Vec::new();
        self.for_each_at(p3, |w| out.push(w));
        out
    }
}

/// Every witness with `p3 <= n`, ordered by `(p3, p1)` with `p1 <= p2`.
pub fn search_witnesses(pt: &PrimeTable, c: &Coloring) -> Result<Vec<Witness>> {
    let n = prime_domain(pt, c)?;
    let labels = c.labels();
    let index = ClassIndex::new(pt.up_to(n), labels, c.k());
    Ok(pt
        .up_to(n)
        .par_iter()
        .flat_map_iter(|&p3| index.witnesses_at(p3))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessScan {
    /// The first `max_listed` witnesses in `(p3, p1)` order.
    pub listed: Vec<Witness>,
    pub total: u64,
    pub distinct: u64,
    pub per_color: Vec<u64>,
    pub first_distinct_per_color: Vec<Option<Witness>>,
}

const SCAN_CHUNK: usize = 256;

/// Counts every witness with `p3 <= n` but keeps only a prefix of the list.
pub fn scan_witnesses(pt: &PrimeTable, c: &Coloring, max_listed: usize) -> Result<WitnessScan> {
    let n = prime_domain(pt, c)?;
    let labels = c.labels();
    let k = c.k() as usize;
    let primes = pt.up_to(n);
    let index = ClassIndex::new(primes, labels, c.k());
    let chunks: Vec<WitnessScan> = primes
        .par_chunks(SCAN_CHUNK)
        .map(|chunk| {
            let mut scan = WitnessScan {
                listed: Vec::new(),
                total: 0,
                distinct: 0,
                per_color: vec![0; k],
                first_distinct_per_color: vec![None; k],
            };
            for &p3 in chunk {
                index.for_each_at(p3, |w| {
                    scan.total += 1;
                    scan.per_color[w.color as usize - 1] += 1;
                    if w.distinct {
                        scan.distinct += 1;
                        scan.first_distinct_per_color[w.color as usize - 1].get_or_insert(w);
                    }
                    if scan.listed.len() < max_listed {
                        scan.listed.push(w);
                    }
                });
            }
            scan
        })
        .collect();

    let mut out = WitnessScan {
        listed: Vec::new(),
        total: 0,
        distinct: 0,
        per_color: vec![0; k],
        first_distinct_per_color: vec![None; k],
    };
    for chunk in chunks {
        out.total += chunk.total;
        out.distinct += chunk.distinct;
        for i in 0..k {
            out.per_color[i] += chunk.per_color[i];
            if out.first_distinct_per_color[i].is_none() {
                out.first_distinct_per_color[i] = chunk.first_distinct_per_color[i];
            }
        }
        let room = max_listed - out.listed.len();
        out.listed.extend(chunk.listed.into_iter().take(room));
    }
    Ok(out)
}

/// Number of witnesses with all three primes `= 1 (mod W)` and `p3 <= top`,
/// counted as ordered pairs `(p1, p2)`.
pub fn count_ordered_in_class(
    pt: &PrimeTable,
    c: &Coloring,
    modulus: u64,
    top: u64,
) -> Result<u64> {
    let n = prime_domain(pt, c)?;
    if top > n {
        return Err(Error::Parameter(format!(
            "class bound {top} above coloring bound {n}"
        )));
    }
    let labels = c.labels();
    let index = ClassIndex::new(pt.up_to(top), labels, c.k());
    let class: Vec<u64> = pt
        .up_to(top)
        .iter()
        .copied()
        .filter(|&p| p % modulus == 1 % modulus)
        .collect();
    Ok(class
        .par_iter()
        .map(|&p3| {
            index
                .witnesses_at(p3)
                .iter()
                .filter(|w| w.p1 % modulus == 1 % modulus && w.p2 % modulus == 1 % modulus)
                .map(|w| if w.p1 == w.p2 { 1 } else { 2 })
                .sum::<u64>()
        })
        .sum())
}

/// `(p0, p1, p2, p3)` of one color with `p2 = p1 + (p0 - 1)` and
/// `p3 = p1 + 2 (p0 - 1) <= n`, ordered by `(p0, p1)`.
pub fn conjecture_search_l3(pt: &PrimeTable, c: &Coloring) -> Result<Vec<[u64; 4]>> {
    let n = prime_domain(pt, c)?;
    let labels = c.labels();
    let primes = pt.up_to(n);
    Ok(primes
        .par_iter()
        .flat_map_iter(|&p0| {
            let d = p0 - 1;
            let color = labels[p0 as usize];
            primes
                .iter()
                .take_while(move |&&p1| p1 + 2 * d <= n)
                .filter(move |&&p1| {
                    let (p2, p3) = (p1 + d, p1 + 2 * d);
                    labels[p1 as usize] == color
                        && pt.contains(p2)
                        && pt.contains(p3)
                        && labels[p2 as usize] == color
                        && labels[p3 as usize] == color
                })
                .map(move |&p1| [p0, p1, p1 + d, p1 + 2 * d])
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::{constant_coloring, residue_coloring};
    use crate::primes::sieve_primes;
    use std::collections::BTreeMap;

    #[test]
    fn single_color_small() {
        let pt = sieve_primes(10).unwrap();
        let c = constant_coloring(Domain::PrimesUpTo(10));
        let ws = search_witnesses(&pt, &c).unwrap();
        assert!(ws.contains(&Witness::new(2, 2, 3, 1)));
        assert!(!Witness::new(2, 2, 3, 1).distinct);
        assert!(ws.contains(&Witness::new(3, 5, 7, 1)));
        assert!(Witness::new(3, 5, 7, 1).distinct);
        assert!(ws.iter().all(|w| w.certify(&c)));
        assert!(ws
            .windows(2)
            .all(|p| (p[0].p3, p[0].p1) < (p[1].p3, p[1].p1)));
    }

    #[test]
    fn split_colors_exclude() {
        let pt = sieve_primes(10).unwrap();
        let c = Coloring::from_pairs(Domain::PrimesUpTo(10), 2, [(2, 1), (3, 1), (5, 2), (7, 1)])
            .unwrap();
        let ws = search_witnesses(&pt, &c).unwrap();
        assert!(ws.iter().all(|w| (w.p1, w.p2, w.p3) != (3, 5, 7)));
    }

    #[test]
    fn scan_agrees_with_full_search() {
        let pt = sieve_primes(5000).unwrap();
        let map = BTreeMap::from([(1, 1), (3, 2), (2, 1)]);
        let c = residue_coloring(Domain::PrimesUpTo(5000), 4, &map).unwrap();
        let all = search_witnesses(&pt, &c).unwrap();
        let scan = scan_witnesses(&pt, &c, 10).unwrap();
        assert_eq!(scan.total, all.len() as u64);
        assert_eq!(scan.listed, all[..10].to_vec());
        assert_eq!(
            scan.distinct,
            all.iter().filter(|w| w.distinct).count() as u64
        );
        assert_eq!(scan.per_color.iter().sum::<u64>(), scan.total);
    }

    #[test]
    fn conjecture_examples() {
        let pt = sieve_primes(100).unwrap();
        let c = constant_coloring(Domain::PrimesUpTo(100));
        let q = conjecture_search_l3(&pt, &c).unwrap();
        assert!(q.contains(&[3, 3, 5, 7]));
        assert!(q.contains(&[7, 5, 11, 17]));
        assert!(q
            .iter()
            .all(|&[p0, p1, p2, p3]| p2 - p1 == p0 - 1 && p3 - p2 == p0 - 1));
    }

    #[test]
    fn interval_coloring_rejected() {
        let pt = sieve_primes(10).unwrap();
        assert!(search_witnesses(&pt, &constant_coloring(Domain::Interval(10))).is_err());
    }
}
