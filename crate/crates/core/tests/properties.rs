mod oracles;

use std::collections::BTreeMap;

use proptest::prelude::*;
use schur_primes::bohr::{build_bohr_set, triple_sum};
use schur_primes::coloring::{random_coloring, residue_coloring, Coloring, Domain};
use schur_primes::fourier::{dft, large_spectrum_from_tables, WeightVector};
use schur_primes::graph::{build_clique, count_mono_triangles, extract_mono_triangles_pigeonhole};
use schur_primes::grid::fourier_identities;
use schur_primes::primes::{
    build_w_trick, euler_phi, gcd, is_prime, residue_class_elements, sieve_primes,
};
use schur_primes::schur::count_schur_triples;
use schur_primes::search::search_witnesses;

fn prime_coloring(n: u64, k: u16, seed: u64) -> Coloring {
    random_coloring(Domain::PrimesUpTo(n), k, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_is_multiplicative(a in 1u64..10_000, b in 1u64..10_000) {
        prop_assume!(gcd(a, b) == 1);
        prop_assert_eq!(euler_phi(a * b), euler_phi(a) * euler_phi(b));
    }

    #[test]
    fn phi_matches_gcd_count(m in 1u64..3_000) {
        prop_assert_eq!(euler_phi(m), oracles::phi_by_gcd(m));
    }

    #[test]
    fn sieve_matches_trial_division(limit in 2u64..10_000) {
        let pt = sieve_primes(limit).unwrap();
        let expected: Vec<u64> = (2..=limit).filter(|&x| oracles::trial_division(x)).collect();
        prop_assert_eq!(pt.primes(), &expected[..]);
    }

    #[test]
    fn w_trick_invariants(n in 1_000u64..2_000_000, w in 2u64..8, kappa in 0.05f64..0.45) {
        if let Ok(p) = build_w_trick(n, w, kappa) {
            let primorial: u64 = (2..=w).filter(|&q| oracles::trial_division(q)).product();
            prop_assert_eq!(p.modulus, primorial);
            prop_assert!(p.modulus * p.m <= n && n < p.modulus * (p.m + 1));
            let (lo, hi) = ((2.0 + kappa) * p.m as f64, (2.0 + 2.0 * kappa) * p.m as f64);
            prop_assert!(lo <= p.big_n as f64 && p.big_n as f64 <= hi);
            prop_assert!(oracles::trial_division(p.big_n));
            let below = (lo.ceil() as u64..p.big_n).find(|&x| oracles::trial_division(x));
            prop_assert_eq!(below, None);
            prop_assert!(2 * p.m < p.big_n);
        }
    }

    #[test]
    fn residue_class_elements_are_prime(n in 1_000u64..50_000, w in 2u64..6) {
        let p = build_w_trick(n, w, 0.25).unwrap();
        let pt = sieve_primes(p.modulus * p.m + 1).unwrap();
        let xs = residue_class_elements(&pt, &p, 1).unwrap();
        for x in 1..=p.m {
            prop_assert_eq!(xs.binary_search(&x).is_ok(), is_prime(p.modulus * x + 1));
        }
    }

    #[test]
    fn colorings_are_total_partitions(n in 2u64..3_000, k in 1u16..6, seed in any::<u64>()) {
        let c = random_coloring(Domain::Interval(n), k, seed).unwrap();
        let classes = c.classes();
        let mut all: Vec<u64> = classes.concat();
        all.sort_unstable();
        prop_assert_eq!(all, (1..=n).collect::<Vec<_>>());
        for x in 1..=n {
            let color = c.color(x).unwrap();
            prop_assert!((1..=k).contains(&color));
            prop_assert!(classes[color as usize - 1].contains(&x));
        }
    }

    #[test]
    fn coloring_text_round_trip(n in 2u64..2_000, k in 1u16..5, seed in any::<u64>(), primes in any::<bool>()) {
        let domain = if primes { Domain::PrimesUpTo(n) } else { Domain::Interval(n) };
        let c = random_coloring(domain, k, seed).unwrap();
        prop_assert_eq!(Coloring::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn merging_colors_never_lowers_the_count(n in 2u64..400, k in 2u16..6, seed in any::<u64>(), a in 1u16..6, b in 1u16..6) {
        prop_assume!(a <= k && b <= k && a != b);
        let c = random_coloring(Domain::Interval(n), k, seed).unwrap();
        let merged = c.relabel(k, |x| if x == b { a } else { x }).unwrap();
        prop_assert!(count_schur_triples(&merged).unwrap().total >= count_schur_triples(&c).unwrap().total);
    }

    #[test]
    fn counts_ignore_label_names(n in 2u64..400, k in 1u16..6, seed in any::<u64>(), shift in 0u16..6) {
        let c = random_coloring(Domain::Interval(n), k, seed).unwrap();
        let permuted = c.relabel(k, |x| (x - 1 + shift) % k + 1).unwrap();
        let (before, after) = (count_schur_triples(&c).unwrap(), count_schur_triples(&permuted).unwrap());
        prop_assert_eq!(before.total, after.total);
        let mut x = before.per_color.clone();
        let mut y = after.per_color.clone();
        x.sort_unstable();
        y.sort_unstable();
        prop_assert_eq!(x, y);
        prop_assert_eq!(before.total, oracles::schur_count_direct(c.labels(), n as usize));
    }

    #[test]
    fn triangles_match_weighted_pairs(n in 2u64..120, k in 1u16..4, seed in any::<u64>()) {
        let c = random_coloring(Domain::Interval(n), k, seed).unwrap();
        let g = build_clique(&c).unwrap();
        let triangles: u64 = count_mono_triangles(&g).iter().sum();
        prop_assert_eq!(triangles, oracles::correspondence_sum(c.labels(), n as usize));
        // each Schur triple accounts for at most n triangles
        prop_assert!(triangles <= n * count_schur_triples(&c).unwrap().total);
    }

    #[test]
    fn extracted_triangles_are_monochromatic(n in 5u64..80, k in 1u16..4, seed in any::<u64>()) {
        let c = random_coloring(Domain::Interval(n), k, seed).unwrap();
        let g = build_clique(&c).unwrap();
        if let Ok(ex) = extract_mono_triangles_pigeonhole(&g, k) {
            for t in &ex.triangles {
                prop_assert!(g.is_monochromatic(*t).is_some());
            }
        }
    }

    #[test]
    fn witnesses_match_hash_set_search(n in 3u64..3_000, k in 1u16..4, seed in any::<u64>()) {
        let c = prime_coloring(n, k, seed);
        let pt = sieve_primes(n).unwrap();
        let found: Vec<_> = search_witnesses(&pt, &c).unwrap()
            .into_iter()
            .map(|w| {
                assert!(w.certify(&c) && w.p1 <= w.p2);
                (w.p1, w.p2, w.p3, w.color)
            })
            .collect();
        let colors = c.elements().iter().map(|&p| (p, c.color(p).unwrap())).collect();
        prop_assert_eq!(found, oracles::hash_set_witnesses(&colors, n));
    }

    #[test]
    fn witness_multiset_ignores_label_names(n in 3u64..3_000, k in 2u16..4, seed in any::<u64>()) {
        let c = prime_coloring(n, k, seed);
        let swapped = c.relabel(k, |x| if x == 1 { 2 } else if x == 2 { 1 } else { x }).unwrap();
        let pt = sieve_primes(n).unwrap();
        let strip = |c: &Coloring| -> Vec<(u64, u64, u64)> {
            search_witnesses(&pt, c).unwrap().iter().map(|w| (w.p1, w.p2, w.p3)).collect()
        };
        prop_assert_eq!(strip(&c), strip(&swapped));
    }

    #[test]
    fn bohr_sets_are_symmetric_and_normalised(
        n in prop::sample::select(vec![113u64, 1009, 2053]),
        kappa in 0.05f64..0.45,
        eps in 0.02f64..0.45,
        freqs in prop::collection::vec(0u64..2053, 0..4),
    ) {
        let freqs: Vec<u64> = freqs.into_iter().map(|r| r % n).collect();
        let b = build_bohr_set(&freqs, kappa, eps, n).unwrap();
        prop_assert!(b.contains(0));
        for &x in &b.elements {
            prop_assert!(b.contains((n - x) % n));
        }
        prop_assert!((b.beta.sum() - 1.0).abs() <= 1e-12);
        prop_assert_eq!(&b.elements, &oracles::bohr_scan(&freqs, kappa, eps, n));
    }

    #[test]
    fn triple_sum_routes_agree(n in 2usize..400, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect();
        let w: Vec<WeightVector> = v.iter().map(|x| WeightVector::new(x.clone()).unwrap()).collect();
        let t = triple_sum(&w[0], &w[1], &w[2]).unwrap();
        let oracle = oracles::triple_sum_direct(&v[0], &v[1], &v[2]);
        prop_assert!((t.fourier - oracle).abs() <= 1e-9 * oracle.abs());
        prop_assert!((t.direct.unwrap() - oracle).abs() <= 1e-9 * oracle.abs());
    }

    #[test]
    fn coefficients_bounded_by_mass(n in 3usize..300, k in 1usize..4, seed in any::<u64>(), delta in 0.01f64..0.99) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut a = vec![vec![0.0; n]; k];
        #[allow(clippy::needless_range_loop)]
        for x in 0..n {
            if rng.random_bool(0.5) {
                a[rng.random_range(0..k)][x] = rng.random::<f64>() / n as f64;
            }
        }
        let a0: Vec<f64> = (0..n).map(|x| a.iter().map(|f| f[x]).sum()).collect();
        let t0 = dft(&WeightVector::new(a0).unwrap());
        let tables: Vec<_> = a.iter().map(|f| dft(&WeightVector::new(f.clone()).unwrap())).collect();
        for t in &tables {
            let mass = t.coefficients()[0].re;
            prop_assert!(mass <= t0.coefficients()[0].re + 1e-12);
            for c in t.coefficients() {
                prop_assert!(c.norm() <= mass + 1e-12);
            }
        }
        let spectrum = large_spectrum_from_tables(&tables, delta).unwrap();
        for r in 0..n {
            let top = tables.iter().map(|t| t.coefficients()[r].norm()).fold(0.0, f64::max);
            prop_assert_eq!(spectrum.frequencies.contains(&(r as u64)), top >= delta);
        }
    }
}

#[test]
fn transform_identities_at_the_larger_moduli() {
    for r in fourier_identities(&[113, 1009, 10007], 17).unwrap() {
        assert!(r.holds, "{}: {:e}", r.lemma, r.measured);
    }
}

#[test]
fn mod_four_classes_round_trip() {
    let classes = BTreeMap::from([(1, 1), (3, 2), (2, 1)]);
    let c = residue_coloring(Domain::PrimesUpTo(5_000), 4, &classes).unwrap();
    assert_eq!(Coloring::parse(&c.to_text()).unwrap(), c);
}
