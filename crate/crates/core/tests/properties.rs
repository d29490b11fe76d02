mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use metagraph::construct::gen::Gen;
use metagraph::construct::{crf_count, decompose, decompose_with, enumerate_crfs, Strategy};
use metagraph::io::{parse, serialize, MgfDocument};
use metagraph::morph::{cata, chrono, histo, hylo, NumTargets, Oblivious, ObliviousCo, Rebuild, ShortestPaths};
use metagraph::process::{reverse_trace, traversal_to_dtmg, RealizedTmg, VirtualTmg};
use metagraph::topology::continuity::Replay;
use metagraph::topology::{elem_hom_apply, smooth_image, HomMapping, Topology};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 64,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn topology_axioms(seed in any::<u64>(), n in 0usize..8) {
        let d = Gen::crisp(seed).dtmg(n);
        let t = Topology::of(&d).unwrap();
        let opens: BTreeSet<u128> = t.open_masks().into_iter().collect();
        prop_assert_eq!(&opens, &common::brute_opens(&t));
        prop_assert!(opens.contains(&0) && opens.contains(&t.full_mask()));
        for &a in &opens {
            for &b in &opens {
                prop_assert!(opens.contains(&(a | b)));
            }
        }
    }

    #[test]
    fn interior_is_deflationary_idempotent_and_monotone(seed in any::<u64>(), n in 1usize..8, a in any::<u128>(), b in any::<u128>()) {
        let d = Gen::crisp(seed).dtmg(n);
        let t = Topology::of(&d).unwrap();
        let (a, b) = (a & t.full_mask(), b & t.full_mask());
        let ia = t.interior_mask(a);
        prop_assert_eq!(ia & !a, 0);
        prop_assert_eq!(t.interior_mask(ia), ia);
        prop_assert!(t.is_open_mask(ia));
        let ab = t.interior_mask(a & b);
        prop_assert_eq!(ab & !ia, 0);
    }

    #[test]
    fn heyting_residuation(seed in any::<u64>(), n in 0usize..=6) {
        let d = Gen::crisp(seed).dtmg(n);
        let t = Topology::of(&d).unwrap();
        let opens = t.opens();
        prop_assert!(common::residuation(&opens).is_ok());
        for a in &opens {
            prop_assert_eq!(a.not().mask(), a.implies(&t.empty_set()).unwrap().mask());
        }
    }

    #[test]
    fn elementary_homomorphisms_keep_graphs_valid(seed in any::<u64>(), n in 1usize..7) {
        let mut gen = Gen::crisp(seed);
        if let Some((g, copy, orig)) = common::host_with_copy(&mut gen, n) {
            let h = HomMapping::positional(&g, &[(copy.as_str(), orig.as_str())]).unwrap();
            let out = elem_hom_apply(&g, &h).unwrap();
            prop_assert!(out.validate().is_empty(), "{:?}", out.validate());
            prop_assert!(!out.contains_edge(&copy));
            prop_assert_eq!(out.edge_count(), g.edge_count() - 1);
        }
    }

    #[test]
    fn smooth_preimages_are_open(seed in any::<u64>(), n in 1usize..6) {
        let mut gen = Gen::crisp(seed);
        let g = common::smooth_host(&mut gen, n);
        if let Some(s) = common::random_smooth(&mut gen, &g) {
            let img = smooth_image(&g, &s).unwrap();
            for o in img.codomain.opens() {
                let p = img.preimage(&o).unwrap();
                prop_assert!(p.is_empty() || img.domain.is_open_mask(p.mask()));
            }
        }
    }

    #[test]
    fn parity_law(seed in any::<u64>(), ops in proptest::collection::vec(any::<bool>(), 0..=6)) {
        let mut gen = Gen::crisp(seed);
        let d = gen.dtmg(3);
        let virt = Arc::new(VirtualTmg::new(gen.registry.clone(), 4));
        let mut r = RealizedTmg::new(virt);
        for e in d.base().edges() {
            r = r.realize(&e.id, &e.key(), &[]).unwrap();
        }
        let Some(id) = d.base().edge_ids().next().map(String::from) else { return Ok(()) };
        let mut n = 0;
        for forget in ops {
            let next = if forget || n == 0 { r.forget(&id) } else { r.reinsert(&id) };
            r = next.unwrap();
            n += 1;
        }
        prop_assert_eq!(r.pruned().contains_edge(&id), n % 2 == 0);
        prop_assert!(r.pruned().validate().is_empty());
    }

    #[test]
    fn traces_validate_and_reverse(seed in any::<u64>(), n in 0usize..8) {
        let mut gen = Gen::crisp(seed);
        let d = gen.dtmg(n);
        let t = common::walk_of(&mut gen, &d);
        let fwd = traversal_to_dtmg(d.base(), &t).unwrap();
        prop_assert!(fwd.base().validate().is_empty());
        let back = traversal_to_dtmg(d.base(), &reverse_trace(&t)).unwrap();
        let (fi, fo) = common::io_sets(&fwd);
        let (bi, bo) = common::io_sets(&back);
        prop_assert_eq!(fi, bo);
        prop_assert_eq!(fo, bi);
        prop_assert_eq!(reverse_trace(&reverse_trace(&t)), t);
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>(), n in 0usize..8) {
        let mut gen = Gen::crisp(seed);
        let d = gen.dtmg(n);
        let mut doc = MgfDocument::new(d.base().clone());
        doc.dtmgs.insert("d".into(), d.clone());
        doc.traces.push(common::walk_of(&mut gen, &d));
        let text = serialize(&doc);
        let back = parse(&text).unwrap();
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(back.tmg, doc.tmg);
    }

    #[test]
    fn crf_counts(m in 0usize..=4, n in 0usize..=4) {
        let listed: BTreeSet<Vec<(usize, usize)>> = enumerate_crfs(m, n).unwrap().map(|p| p.pairs().to_vec()).collect();
        prop_assert_eq!(listed.len() as u128, crf_count(m, n));
        prop_assert_eq!(crf_count(m, n), common::closed_form(m, n));
    }

    #[test]
    fn folds_do_not_depend_on_decomposition(seed in any::<u64>(), n in 0usize..=10) {
        let mut gen = Gen::crisp(seed);
        let d = gen.dtmg(n);
        let a = decompose(&d).unwrap();
        let b = decompose_with(&d, Strategy::Reverse).unwrap();
        prop_assert_eq!(cata(&NumTargets, &a).unwrap(), cata(&NumTargets, &b).unwrap());
        let (ta, tb) = (cata(&ShortestPaths, &a).unwrap(), cata(&ShortestPaths, &b).unwrap());
        let keys: Vec<_> = d.base().edges().map(|e| e.key()).collect();
        for s in &keys {
            for t in &keys {
                prop_assert_eq!(ta.length(s, t), tb.length(s, t));
                prop_assert_eq!(ta.length(s, t), common::bfs_length(d.base(), s, t));
            }
        }
    }

    #[test]
    fn hylo_and_chrono_identities(seed in any::<u64>()) {
        let mut gen = Gen::crisp(seed);
        let reg = gen.registry.clone();
        let max = gen.rng.gen_range(1..=10);
        let (x, _) = gen.bounded_expr(max).unwrap();
        let h = hylo(&NumTargets, &Replay, &x).unwrap();
        prop_assert_eq!(h, cata(&NumTargets, &metagraph::morph::ana(&Replay, &x).unwrap()).unwrap());
        prop_assert_eq!(chrono(&Oblivious(NumTargets), &ObliviousCo(Replay), &reg, &x).unwrap(), h);
        prop_assert_eq!(hylo(&Rebuild, &Replay, &x).unwrap(), x);
    }

    #[test]
    fn history_links_reproduce_parents(seed in any::<u64>()) {
        let mut gen = Gen::crisp(seed);
        let reg = gen.registry.clone();
        let (x, d) = gen.bounded_expr(8).unwrap();
        let (_, hist) = histo(&Oblivious(Rebuild), &reg, &x).unwrap();
        hist.check_links().unwrap();
        prop_assert!(metagraph::iso::isomorphic(&hist.label().unwrap(), &d));
    }
}
