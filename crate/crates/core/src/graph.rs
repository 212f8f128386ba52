//! The complete graph on `v_0..v_n` whose edge `v_s v_t` carries the color of
//! `t - s`, monochromatic triangle counts, and the constructive pigeonhole
//! induction that certifies triangles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::coloring::{Color, Coloring, Domain};
use crate::error::{Error, Result};
use crate::schur::schur_constants;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeColoredClique {
    n_vertices: usize,
    k: Color,
    colors: Vec<Color>,
}

impl EdgeColoredClique {
    /// Arbitrary coloring given by `f(s, t)` for `s < t`.
    pub fn from_fn(n_vertices: usize, k: Color, f: impl Fn(usize, usize) -> Color) -> Result<Self> {
        let mut colors = vec![0; n_vertices * n_vertices];
        for s in 0..n_vertices {
            for t in s + 1..n_vertices {
                let c = f(s, t);
                if c == 0 || c > k {
                    return Err(Error::Domain(format!("edge ({s}, {t}) has color {c}")));
                }
                colors[s * n_vertices + t] = c;
                colors[t * n_vertices + s] = c;
            }
        }
        Ok(EdgeColoredClique {
            n_vertices,
            k,
            colors,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn k(&self) -> Color {
        self.k
    }

    pub fn edge_color(&self, s: usize, t: usize) -> Color {
        self.colors[s * self.n_vertices + t]
    }

    /// The shared color of a triangle's three edges, if any.
    pub fn is_monochromatic(&self, [a, b, c]: [usize; 3]) -> Option<Color> {
        let x = self.edge_color(a, b);
        (a != b && b != c && a != c && x == self.edge_color(b, c) && x == self.edge_color(a, c))
            .then_some(x)
    }
}

/// `K_{n+1}` on `v_0..v_n` with edge `v_s v_t` colored `c(t - s)`.
pub fn build_clique(c: &Coloring) -> Result<EdgeColoredClique> {
    let Domain::Interval(n) = c.domain() else {
        return Err(Error::Domain(
            "clique construction needs an interval coloring".into(),
        ));
    };
    if n < 2 {
        return Err(Error::Parameter(format!("need n >= 2, got {n}")));
    }
    let labels = c.labels();
    let g = EdgeColoredClique::from_fn(n as usize + 1, c.k(), |s, t| labels[t - s])?;
    for s in 0..=n as usize {
        for t in s + 1..=n as usize {
            debug_assert_eq!(g.edge_color(s, t), labels[t - s]);
        }
    }
    Ok(g)
}

/// Per-color counts of unordered monochromatic vertex triples.
pub fn count_mono_triangles(g: &EdgeColoredClique) -> Vec<u64> {
    let v = g.n_vertices;
    let k = g.k as usize;
    (0..v)
        .into_par_iter()
        .fold(
            || vec![0u64; k],
            |mut acc, a| {
                for b in a + 1..v {
                    let c = g.edge_color(a, b);
                    for d in b + 1..v {
                        if g.edge_color(a, d) == c && g.edge_color(b, d) == c {
                            acc[c as usize - 1] += 1;
                        }
                    }
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; k],
            |mut x, y| {
                x.iter_mut().zip(y).for_each(|(p, q)| *p += q);
                x
            },
        )
}

#[derive(Debug, Clone, Serialize)]
pub struct PigeonholeExtraction {
    /// Sorted, deduplicated, each certified monochromatic in the input graph.
    pub triangles: Vec<[usize; 3]>,
    /// `C1'(k) V^3` as an exact rational.
    pub bound: String,
    pub bound_f64: f64,
    pub bound_vacuous: bool,
    /// Candidates dropped because a merged color made them look monochromatic.
    pub rejected: u64,
    /// `(depth, vertex, case)` for each branching decision taken.
    pub branches: Vec<(usize, usize, Branch)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Few edges of the majority color inside the neighbourhood: recurse
    /// with one color fewer.
    Recurse,
    /// Many such edges: each closes a triangle through the vertex.
    Close,
}

struct Extractor<'g> {
    g: &'g EdgeColoredClique,
    found: Vec<[usize; 3]>,
    rejected: u64,
    branches: Vec<(usize, usize, Branch)>,
}

impl Extractor<'_> {
    fn push(&mut self, mut tri: [usize; 3]) {
        tri.sort_unstable();
        if self.g.is_monochromatic(tri).is_some() {
            self.found.push(tri);
        } else {
            self.rejected += 1;
        }
    }

    /// `remap` sends every original color to its current effective color;
    /// `available` lists the effective colors still in play.
    fn run(
        &mut self,
        vertices: &[usize],
        remap: &[Color],
        available: &[Color],
        depth: usize,
    ) -> Result<()> {
        let n = vertices.len();
        if n < 3 {
            return Ok(());
        }
        let kk = available.len();
        if kk == 1 {
            for (i, &a) in vertices.iter().enumerate() {
                for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                    for &c in &vertices[j + 1..] {
                        self.push([a, b, c]);
                    }
                }
            }
            return Ok(());
        }
        let eff = |s: usize, t: usize| remap[self.g.edge_color(s, t) as usize];

        // threshold C1'(kk-1) / (2 kk^3) n^2, compared exactly
        let base = schur_constants(kk as u32 - 1)?.c1_prime;
        let threshold = base / BigRational::from_integer(BigInt::from(2 * (kk as u64).pow(3)))
            * BigRational::from_integer(BigInt::from((n as u64).pow(2)));
        let need = (n - 1).div_ceil(kk);

        let mut recurse_into: Option<(usize, Color, Vec<usize>)> = None;
        for &s in vertices {
            let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); remap.len()];
            for &u in vertices.iter().filter(|&&u| u != s) {
                buckets[eff(s, u) as usize].push(u);
            }
            let majority = available
                .iter()
                .copied()
                .max_by_key(|&c| (buckets[c as usize].len(), std::cmp::Reverse(c)))
                .expect("at least two colors");
            let hood: Vec<usize> = buckets[majority as usize]
                .iter()
                .copied()
                .take(need)
                .collect();
            let mut inner = Vec::new();
            for (i, &u) in hood.iter().enumerate() {
                for &v in &hood[i + 1..] {
                    if eff(u, v) == majority {
                        inner.push((u, v));
                    }
                }
            }
            let count = BigRational::from_integer(BigInt::from(inner.len()));
            if count <= threshold {
                self.branches.push((depth, s, Branch::Recurse));
                if recurse_into.is_none() {
                    recurse_into = Some((s, majority, hood));
                }
            } else {
                self.branches.push((depth, s, Branch::Close));
                for (u, v) in inner {
                    self.push([s, u, v]);
                }
            }
        }

        if let Some((_, dropped, hood)) = recurse_into {
            let rest: Vec<Color> = available
                .iter()
                .copied()
                .filter(|&c| c != dropped)
                .collect();
            let target = rest[0];
            let next: Vec<Color> = remap
                .iter()
                .map(|&c| if c == dropped { target } else { c })
                .collect();
            self.run(&hood, &next, &rest, depth + 1)?;
        }
        Ok(())
    }
}

/// Runs the induction on the number of colors as an algorithm: every vertex
/// picks its majority color class of size `ceil((V-1)/k)`; if that class
/// spans few edges of the same color the search recurses into it with that
/// color merged away, otherwise each such edge closes a triangle.
pub fn extract_mono_triangles_pigeonhole(
    g: &EdgeColoredClique,
    k: Color,
) -> Result<PigeonholeExtraction> {
    if k == 0 || k < g.k {
        return Err(Error::Parameter(format!(
            "k = {k} below the graph's color count {}",
            g.k
        )));
    }
    let v = g.n_vertices;
    if v < 2 || (v - 1).div_ceil(k as usize) < 2 {
        return Err(Error::Parameter(format!(
            "ceil((V-1)/k) must be at least 2 (V = {v}, k = {k})"
        )));
    }
    let c1p = schur_constants(u32::from(k))?.c1_prime;
    let bound = c1p * BigRational::from_integer(BigInt::from((v as u64).pow(3)));
    let bound_f64 = bound.to_f64().unwrap_or(0.0);

    let remap: Vec<Color> = (0..=k).collect();
    let available: Vec<Color> = (1..=k).collect();
    let mut ex = Extractor {
        g,
        found: Vec::new(),
        rejected: 0,
        branches: Vec::new(),
    };
    let all: Vec<usize> = (0..v).collect();
    ex.run(&all, &remap, &available, 0)?;
    ex.found.sort_unstable();
    ex.found.dedup();
    Ok(PigeonholeExtraction {
        bound_vacuous: bound_f64 < 1.0,
        bound: bound.to_string(),
        bound_f64,
        triangles: ex.found,
        rejected: ex.rejected,
        branches: ex.branches,
    })
}
