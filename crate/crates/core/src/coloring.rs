//! Finite k-colorings of the primes up to `n` or of the interval `[1, n]`.
//!
//! Colors are 1-based. Internally a coloring is a dense label table indexed
//! by element value, with label 0 reserved for "not in the domain".

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::{is_prime, sieve_primes};

pub type Color = u16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum Domain {
    PrimesUpTo(u64),
    Interval(u64),
}

impl Domain {
    pub fn bound(&self) -> u64 {
        match *self {
            Domain::PrimesUpTo(n) | Domain::Interval(n) => n,
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        match *self {
            Domain::PrimesUpTo(n) => x <= n && is_prime(x),
            Domain::Interval(n) => (1..=n).contains(&x),
        }
    }

    /// Domain elements in increasing order.
    pub fn elements(&self) -> Vec<u64> {
        match *self {
            Domain::PrimesUpTo(n) if n < 2 => Vec::new(),
            Domain::PrimesUpTo(n) => sieve_primes(n)
                .map(|t| t.primes().to_vec())
                .unwrap_or_default(),
            Domain::Interval(n) => (1..=n).collect(),
        }
    }

    fn label(&self) -> &'static str {
        match self {
            Domain::PrimesUpTo(_) => "primes",
            Domain::Interval(_) => "interval",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    k: Color,
    domain: Domain,
    elements: Vec<u64>,
    labels: Vec<Color>,
}

impl Coloring {
    /// Builds a coloring from `(element, color)` pairs, which must cover the
    /// domain exactly once.
    pub fn from_pairs<I>(domain: Domain, k: Color, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, Color)>,
    {
        if k == 0 {
            return Err(Error::Parameter("k must be at least 1".into()));
        }
        let elements = domain.elements();
        let mut labels = vec![0 as Color; domain.bound() as usize + 1];
        for (x, c) in pairs {
            if !domain.contains(x) {
                return Err(Error::IncompleteColoring(format!(
                    "{x} is outside the domain"
                )));
            }
            if c == 0 || c > k {
                return Err(Error::Domain(format!("color {c} of {x} not in [1, {k}]")));
            }
            if labels[x as usize] != 0 {
                return Err(Error::IncompleteColoring(format!("{x} colored twice")));
            }
            labels[x as usize] = c;
        }
        Self::finish(domain, k, elements, labels)
    }

    fn finish(domain: Domain, k: Color, elements: Vec<u64>, labels: Vec<Color>) -> Result<Self> {
        if let Some(&x) = elements.iter().find(|&&x| labels[x as usize] == 0) {
            return Err(Error::IncompleteColoring(format!("{x} has no color")));
        }
        Ok(Coloring {
            k,
            domain,
            elements,
            labels,
        })
    }

    pub fn k(&self) -> Color {
        self.k
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn color(&self, x: u64) -> Option<Color> {
        self.labels
            .get(usize::try_from(x).ok()?)
            .copied()
            .filter(|&c| c != 0)
    }

    /// Dense label table indexed by value; 0 marks values outside the domain.
    pub fn labels(&self) -> &[Color] {
        &self.labels
    }

    /// Color classes; entry `i` holds the elements of color `i + 1`.
    pub fn classes(&self) -> Vec<Vec<u64>> {
        let mut classes = vec![Vec::new(); self.k as usize];
        for &x in &self.elements {
            classes[self.labels[x as usize] as usize - 1].push(x);
        }
        classes
    }

    /// Declared colors that no element uses.
    pub fn unused_colors(&self) -> Vec<Color> {
        let mut used = vec![false; self.k as usize + 1];
        for &x in &self.elements {
            used[self.labels[x as usize] as usize] = true;
        }
        (1..=self.k).filter(|&c| !used[c as usize]).collect()
    }

    /// Applies `f` to every color label; `k` becomes `new_k`.
    pub fn relabel(&self, new_k: Color, f: impl Fn(Color) -> Color) -> Result<Self> {
        Self::from_pairs(
            self.domain,
            new_k,
            self.elements
                .iter()
                .map(|&x| (x, f(self.labels[x as usize]))),
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "k={} domain={} n={}\n",
            self.k,
            self.domain.label(),
            self.domain.bound()
        );
        for &x in &self.elements {
            let _ = writeln!(out, "{} {}", x, self.labels[x as usize]);
        }
        out
    }

    /// Parses the line format `element color`, with `#` comments and an
    /// optional `k=.. domain=.. n=..` header. Without a header the domain is
    /// the primes up to the largest element if every element is prime, and
    /// the interval `[1, max]` otherwise; `k` is the largest color.
    pub fn parse(text: &str) -> Result<Self> {
        let mut header: Option<(usize, Color, Domain)> = None;
        let mut pairs: Vec<(usize, u64, Color)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if line.starts_with("k=") {
                if header.is_some() || !pairs.is_empty() {
                    return Err(parse_err(line_no, "header must be the first entry"));
                }
                let (k, domain) = parse_header(line_no, line)?;
                header = Some((line_no, k, domain));
                continue;
            }
            let mut fields = line.split_whitespace();
            let (Some(x), Some(c), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(parse_err(line_no, "expected `element color`"));
            };
            let x: u64 = x
                .parse()
                .map_err(|_| parse_err(line_no, &format!("bad element `{x}`")))?;
            let c: Color = c
                .parse()
                .map_err(|_| parse_err(line_no, &format!("bad color `{c}`")))?;
            pairs.push((line_no, x, c));
        }

        let (k, domain) = match header {
            Some((_, k, domain)) => (k, domain),
            None => {
                let max_x = pairs.iter().map(|p| p.1).max().unwrap_or(0);
                let k = pairs.iter().map(|p| p.2).max().unwrap_or(1);
                let domain = if pairs.iter().all(|p| is_prime(p.1)) {
                    Domain::PrimesUpTo(max_x)
                } else {
                    Domain::Interval(max_x)
                };
                (k, domain)
            }
        };
        if k == 0 {
            return Err(parse_err(header.map_or(1, |h| h.0), "k must be at least 1"));
        }

        let mut labels = vec![0 as Color; domain.bound() as usize + 1];
        for &(line_no, x, c) in &pairs {
            if !domain.contains(x) {
                let why = match domain {
                    Domain::PrimesUpTo(n) if x <= n => format!("{x} is not prime"),
                    _ => format!("{x} is outside the domain"),
                };
                return Err(parse_err(line_no, &why));
            }
            if c == 0 || c > k {
                return Err(parse_err(line_no, &format!("color {c} not in [1, {k}]")));
            }
            if labels[x as usize] != 0 {
                return Err(parse_err(line_no, &format!("duplicate element {x}")));
            }
            labels[x as usize] = c;
        }
        Self::finish(domain, k, domain.elements(), labels)
    }
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

fn parse_header(line_no: usize, line: &str) -> Result<(Color, Domain)> {
    let mut k = None;
    let mut kind = None;
    let mut n = None;
    for field in line.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| parse_err(line_no, &format!("bad header field `{field}`")))?;
        match key {
            "k" => k = value.parse::<Color>().ok(),
            "domain" => kind = Some(value.to_string()),
            "n" => n = value.parse::<u64>().ok(),
            _ => return Err(parse_err(line_no, &format!("unknown header key `{key}`"))),
        }
    }
    let (Some(k), Some(kind), Some(n)) = (k, kind, n) else {
        return Err(parse_err(
            line_no,
            "header needs k=<int> domain=<primes|interval> n=<int>",
        ));
    };
    let domain = match kind.as_str() {
        "primes" => Domain::PrimesUpTo(n),
        "interval" => Domain::Interval(n),
        other => return Err(parse_err(line_no, &format!("unknown domain `{other}`"))),
    };
    Ok((k, domain))
}

pub fn load_coloring(path: impl AsRef<Path>) -> Result<Coloring> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Coloring::parse(&text)
}

pub fn store_coloring(c: &Coloring, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, c.to_text()).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// `color(x) = class_to_color[x mod m]`; `k` is the largest mapped color.
pub fn residue_coloring(
    domain: Domain,
    modulus: u64,
    class_to_color: &BTreeMap<u64, Color>,
) -> Result<Coloring> {
    if modulus == 0 {
        return Err(Error::Parameter("modulus must be positive".into()));
    }
    let k = class_to_color.values().copied().max().unwrap_or(0);
    let elements = domain.elements();
    let mut pairs = Vec::with_capacity(elements.len());
    for x in elements {
        let c = class_to_color.get(&(x % modulus)).ok_or_else(|| {
            Error::IncompleteColoring(format!(
                "residue {} mod {modulus} (element {x}) has no color",
                x % modulus
            ))
        })?;
        pairs.push((x, *c));
    }
    Coloring::from_pairs(domain, k.max(1), pairs)
}

/// Independent uniform colors from ChaCha8 seeded with `seed`, drawn in
/// increasing element order.
pub fn random_coloring(domain: Domain, k: Color, seed: u64) -> Result<Coloring> {
    if k == 0 {
        return Err(Error::Parameter("k must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = domain
        .elements()
        .into_iter()
        .map(|x| (x, rng.random_range(1..=k)))
        .collect();
    Coloring::from_pairs(domain, k, pairs)
}

/// A single color on the whole domain.
pub fn constant_coloring(domain: Domain) -> Coloring {
    let elements = domain.elements();
    let mut labels = vec![0 as Color; domain.bound() as usize + 1];
    for &x in &elements {
        labels[x as usize] = 1;
    }
    Coloring {
        k: 1,
        domain,
        elements,
        labels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residue_examples() {
        let map = BTreeMap::from([(1, 1), (3, 2), (2, 1)]);
        let c = residue_coloring(Domain::PrimesUpTo(20), 4, &map).unwrap();
        assert_eq!(
            (c.color(5), c.color(7), c.color(2)),
            (Some(1), Some(2), Some(1))
        );
        assert_eq!(c.k(), 2);

        let c =
            residue_coloring(Domain::Interval(6), 2, &BTreeMap::from([(0, 1), (1, 2)])).unwrap();
        let colors: Vec<_> = (1..=6).map(|x| c.color(x).unwrap()).collect();
        assert_eq!(colors, vec![2, 1, 2, 1, 2, 1]);

        let err =
            residue_coloring(Domain::PrimesUpTo(10), 4, &BTreeMap::from([(1, 1)])).unwrap_err();
        assert!(matches!(err, Error::IncompleteColoring(_)));
    }

    #[test]
    fn random_is_seeded() {
        let c = random_coloring(Domain::Interval(10), 1, 0).unwrap();
        assert!((1..=10).all(|x| c.color(x) == Some(1)));
        let a = random_coloring(Domain::PrimesUpTo(1000), 3, 42).unwrap();
        let b = random_coloring(Domain::PrimesUpTo(1000), 3, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_coloring(Domain::PrimesUpTo(1000), 3, 43).unwrap());
    }

    #[test]
    fn random_class_sizes_are_binomial() {
        // Bin(10^4, 1/2): sigma = 50
        let c = random_coloring(Domain::Interval(10_000), 2, 7).unwrap();
        let sizes: Vec<_> = c.classes().iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 10_000);
        for s in sizes {
            assert!((s as f64 - 5000.0).abs() <= 150.0, "{s}");
        }
    }

    #[test]
    fn parse_headerless() {
        let c = Coloring::parse("2 1\n3 1\n5 2\n").unwrap();
        assert_eq!(c.domain(), Domain::PrimesUpTo(5));
        assert_eq!(c.k(), 2);
        assert_eq!(
            (c.color(2), c.color(3), c.color(5)),
            (Some(1), Some(1), Some(2))
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Coloring::parse("k=2 domain=primes n=5\n2 1\n4 1\n").unwrap_err();
        assert!(
            matches!(err, Error::Parse { line: 3, ref msg } if msg.contains("not prime")),
            "{err}"
        );

        let err = Coloring::parse("# c\nk=2 domain=interval n=2\n1 1\n2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));

        let err = Coloring::parse("k=2 domain=interval n=2\n1 1\n1 2\n2 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, ref msg } if msg.contains("duplicate")));

        let err = Coloring::parse("k=2 domain=interval n=2\n1 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));

        let err = Coloring::parse("k=2 domain=interval n=3\n1 1\n2 1\n").unwrap_err();
        assert!(matches!(err, Error::IncompleteColoring(_)));
    }

    #[test]
    fn comments_and_unused_colors() {
        let c = Coloring::parse("k=3 domain=interval n=2 # header\n1 1 # one\n\n2 1\n").unwrap();
        assert_eq!(c.unused_colors(), vec![2, 3]);
        assert_eq!(Coloring::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn store_load_file() {
        let dir = std::env::temp_dir().join(format!("schur-coloring-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.txt");
        let c = random_coloring(Domain::PrimesUpTo(500), 4, 9).unwrap();
        store_coloring(&c, &path).unwrap();
        assert_eq!(load_coloring(&path).unwrap(), c);
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
