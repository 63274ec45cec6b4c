use std::collections::HashSet;

use mgg::boolmat::{BoolArray, BoolMatrix, Digraph, NodeUniverse};
use mgg::derivation::{apply_at, check_match, find_matches, Match};
use mgg::encoding::{distance, ell, norm};
use mgg::grammar::{parse_grammar, GrammarFile};
use mgg::mcl::{conj, dot, ComplexTerm};
use mgg::oracle::{brute_matches, Generator};
use mgg::production::{
    apply_production, apply_swap, evolve_nihil, p_operator, production_compatible, swap_unit, Production,
};
use mgg::sequence::{
    coherence, fold_sequence, image_of_sequence, initial_digraph, initial_host, sequence_compatibility,
};
use proptest::prelude::*;
use rand::Rng;

fn identity_match(p: &Production) -> Match {
    Match::new((0..p.universe().len()).map(|i| p.lhs.nodes.get(i).then_some(i)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn central_identity(seed in any::<u64>(), n in 1usize..=5) {
        let mut gen = Generator::new(seed);
        let u = NodeUniverse::numbered(n);
        let p = gen.production("p", &u, true);
        let w = p_operator(&p);
        let out = apply_swap(&w, &p.lhs_term()).unwrap();
        prop_assert_eq!(&out.cert_edges, &apply_production(&p, &p.lhs).unwrap().edges);
        prop_assert_eq!(&out.nihil_edges, &evolve_nihil(&p));
        let unit = dot(&w.term, &w.term).unwrap();
        prop_assert_eq!(&unit.cert_edges, &swap_unit(&w));
        prop_assert!(unit.nihil_edges.is_zero());
    }

    #[test]
    fn swap_restriction(seed in any::<u64>(), n in 1usize..=4) {
        let mut gen = Generator::new(seed);
        let u = NodeUniverse::numbered(n);
        let p = gen.production("p", &u, false);
        let z = ComplexTerm::from_matrices(gen.digraph(&u).edges, gen.digraph(&u).edges).unwrap();
        let out = apply_swap(&p_operator(&p), &z).unwrap();
        let both = &z.cert_edges & &z.nihil_edges;
        let neither = &!&z.cert_edges & &!&z.nihil_edges;
        prop_assert_eq!(&(&out.cert_edges & &out.nihil_edges) & &both, both.clone());
        prop_assert!((&(&out.cert_edges | &out.nihil_edges) & &neither).is_zero());
    }

    #[test]
    fn ell_is_injective(seed in any::<u64>(), n in 1usize..=4) {
        let mut gen = Generator::new(seed);
        let u = NodeUniverse::numbered(n);
        let a = gen.digraph(&u).edges;
        let b = gen.digraph(&u).edges;
        prop_assert_eq!(a == b, ell(&a) == ell(&b));
    }

    #[test]
    fn conjugation_keeps_norm_and_distance_is_symmetric(seed in any::<u64>(), n in 1usize..=3) {
        let mut gen = Generator::new(seed);
        let u = NodeUniverse::numbered(n);
        let z1 = ComplexTerm::from_matrices(gen.digraph(&u).edges, gen.digraph(&u).edges).unwrap();
        let z2 = ComplexTerm::from_matrices(gen.digraph(&u).edges, gen.digraph(&u).edges).unwrap();
        prop_assert_eq!(norm(&conj(&z1)), norm(&z1));
        prop_assert_eq!(distance(&z1, &z2).unwrap(), distance(&z2, &z1).unwrap());
    }

    #[test]
    fn matches_reverify_and_results_stay_compatible(seed in any::<u64>()) {
        let mut gen = Generator::new(seed);
        let rule_size = gen.rng().gen_range(1..=3);
        let host_size = gen.rng().gen_range(1..=5);
        let ru = NodeUniverse::numbered(rule_size);
        let hu = NodeUniverse::new((0..host_size).map(|i| format!("h{i}"))).unwrap();
        let p = gen.production("p", &ru, true);
        let g = gen.digraph(&hu);
        let found = find_matches(&p, &g);
        prop_assert_eq!(&found, &brute_matches(&p, &g).unwrap());
        let found_set: HashSet<_> = found.iter().cloned().collect();
        for m in &found {
            prop_assert!(check_match(&p, &g, m).is_ok());
            let h = apply_at(&p, &g, m, 1).unwrap();
            prop_assert!(h.is_compatible());
            // the matched block of the result is the right-hand side
            for (a, b) in p.rhs.edges.iter_ones() {
                if let (Some(x), Some(y)) = (m.image(a), m.image(b)) {
                    prop_assert!(h.edges.get(x, y));
                }
            }
            for (a, b) in p.e_edges.iter_ones() {
                let (x, y) = (m.image(a).unwrap(), m.image(b).unwrap());
                if p.rhs.nodes.get(a) && p.rhs.nodes.get(b) {
                    prop_assert!(!h.edges.get(x, y));
                }
            }
        }
        // a few injective maps outside the result must be rejected
        let lhs_nodes: Vec<usize> = p.lhs.nodes.iter_ones().collect();
        if lhs_nodes.len() <= host_size {
            for _ in 0..8 {
                let mut hosts: Vec<usize> = (0..host_size).collect();
                let mut images = vec![None; rule_size];
                for &i in &lhs_nodes {
                    let k = gen.rng().gen_range(0..hosts.len());
                    images[i] = Some(hosts.swap_remove(k));
                }
                let m = Match::new(images);
                prop_assert_eq!(check_match(&p, &g, &m).is_ok(), found_set.contains(&m));
            }
        }
    }

    #[test]
    fn coherent_sequences_run_on_their_initial_digraph(seed in any::<u64>(), n in 1usize..=3) {
        let mut gen = Generator::new(seed);
        let u = NodeUniverse::numbered(n);
        let s = gen.sequence(&u, 2, true);
        let coherent = coherence(&s).ok;
        let m = initial_digraph(&s);
        prop_assert!(image_of_sequence(&s).eq_normalized(&fold_sequence(&s, &m)) || !coherent);
        if coherent {
            for j in 1..=s.len() {
                prop_assert!(coherence(&s.prefix(j)).ok);
            }
        }
        if coherent && sequence_compatibility(&s).ok {
            prop_assert!((&m.cert_edges & &m.nihil_edges).is_zero());
            let mut x = initial_host(&s);
            for p in &s.rules {
                prop_assert!(check_match(p, &x, &identity_match(p)).is_ok());
                x = apply_production(p, &x).unwrap();
                prop_assert!(x.is_compatible());
            }
        }
    }

    #[test]
    fn grammar_round_trip(seed in any::<u64>(), n in 1usize..=4, rules in 0usize..4, hosts in 0usize..3) {
        let mut gen = Generator::new(seed);
        let u = NodeUniverse::new((0..n).map(|i| format!("v{i}"))).unwrap();
        let productions: Vec<Production> =
            (0..rules).map(|k| gen.production(&format!("r{k}"), &u, true)).collect();
        let names: Vec<String> = productions.iter().map(|p| p.name.clone()).collect();
        let g = GrammarFile {
            universe: u.clone(),
            productions,
            sequences: if names.is_empty() { vec![] } else { vec![("s".into(), names.clone()), ("t".into(), names.into_iter().rev().collect())] },
            hosts: (0..hosts)
                .map(|k| {
                    // a host universe is exactly its listed nodes
                    let hu = NodeUniverse::new((0..n + k).map(|i| format!("h{i}"))).unwrap();
                    let raw = gen.digraph(&hu);
                    let present: Vec<String> = raw.nodes.iter_ones().map(|i| hu.label(i).to_string()).collect();
                    let edges: Vec<(String, String)> = raw
                        .edges
                        .iter_ones()
                        .map(|(i, j)| (hu.label(i).to_string(), hu.label(j).to_string()))
                        .collect();
                    let own = NodeUniverse::new(present.clone()).unwrap();
                    (format!("H{k}"), Digraph::from_labels(&own, &present, &edges).unwrap())
                })
                .collect(),
        };
        let text = g.to_text();
        let parsed = parse_grammar(&text).unwrap();
        prop_assert_eq!(&parsed, &g);
        prop_assert_eq!(parsed.to_text(), text);
    }
}

#[test]
fn compatible_generator_yields_compatible_rules() {
    let mut gen = Generator::new(3);
    for n in 1..=5 {
        let u = NodeUniverse::numbered(n);
        for _ in 0..200 {
            assert!(production_compatible(&gen.production("p", &u, true)));
        }
    }
    let u = NodeUniverse::numbered(2);
    assert!(BoolMatrix::zeros(&u).is_zero());
    assert!(Digraph::empty(&u).is_compatible());
}
