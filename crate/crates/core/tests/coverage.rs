mod common;

use covquiz::flowgraph::{brute_force_counts, build_cfg, coverage_counts, AnalysisConfig, TestingMethod};
use covquiz::minilang::{canonical_text, parse};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn while_loop_with_nested_if_gives_three_two_one() {
    let src = std::fs::read_to_string(common::fixtures().join("while_with_if.py")).unwrap();
    let program = parse(&src).unwrap();
    let graph = build_cfg(&program);
    let counts = coverage_counts(&graph, 1).unwrap();
    assert_eq!(counts.triple(), (3, 2, 1));
    assert!(!counts.approximate);
    assert_eq!(
        brute_force_counts(&graph, &AnalysisConfig::with_loop_bound(1))
            .unwrap()
            .triple(),
        (3, 2, 1)
    );
    assert_eq!(common::oracle_counts(&program, 1), (3, 2, 1));
}

#[test]
fn corpus_counts_match_both_oracles() {
    let corpus = common::corpus();
    assert_eq!(corpus.len(), 9);
    for (id, src) in corpus {
        let program = parse(&src).unwrap_or_else(|e| panic!("{id}: {e}"));
        let graph = build_cfg(&program);
        graph.validate().unwrap();
        for bound in 0..=2 {
            let cfg = AnalysisConfig::with_loop_bound(bound);
            let got = coverage_counts(&graph, bound).unwrap();
            assert_eq!(
                got.triple(),
                common::oracle_counts(&program, bound),
                "{id} at bound {bound}"
            );
            if let Ok(brute) = brute_force_counts(&graph, &cfg) {
                assert_eq!(got.triple(), brute.triple(), "{id} at bound {bound}");
            }
        }
    }
}

#[test]
fn corpus_reference_triples() {
    let expected = [
        ("array_sum", (4, 1, 1)),
        ("factorial_loop_after", (6, 3, 3)),
        ("factorial_loop_in_else", (4, 3, 3)),
        ("max_of_two", (2, 2, 2)),
        ("name_registry", (14, 2, 1)),
        ("number_sign", (3, 3, 3)),
        ("numbers_sum", (4, 1, 1)),
        ("palindrome", (6, 2, 2)),
        ("sum_to_n", (2, 1, 1)),
    ];
    let bank = common::corpus_bank();
    for (id, triple) in expected {
        assert_eq!(bank.get(id).unwrap().counts.triple(), triple, "{id}");
    }
}

#[test]
fn random_programs_match_both_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for i in 0..200 {
        let src = common::random_program(&mut rng, 4);
        let program = parse(&src).unwrap_or_else(|e| panic!("program {i}: {e}\n{src}"));
        assert!(program.decision_count() <= 4);
        let graph = build_cfg(&program);
        graph.validate().unwrap();
        for bound in 0..=2 {
            let got = coverage_counts(&graph, bound).unwrap();
            assert_eq!(
                got.triple(),
                common::oracle_counts(&program, bound),
                "bound {bound}:\n{src}"
            );
            if bound <= 1 {
                let brute = brute_force_counts(&graph, &AnalysisConfig::with_loop_bound(bound)).unwrap();
                assert_eq!(got.triple(), brute.triple(), "bound {bound}:\n{src}");
            }
        }
    }
}

#[test]
fn printing_then_reparsing_preserves_the_graph_and_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..200 {
        let src = common::random_program(&mut rng, 4);
        let program = parse(&src).unwrap();
        let printed = canonical_text(&program);
        let again = parse(&printed).unwrap();
        assert!(program.structurally_eq(&again), "{src}\n---\n{printed}");
        assert_eq!(canonical_text(&again), printed);
        let (g1, g2) = (build_cfg(&program), build_cfg(&again));
        assert_eq!(g1.nodes.len(), g2.nodes.len());
        assert_eq!(g1.edges, g2.edges);
        assert_eq!(coverage_counts(&g1, 1).unwrap(), coverage_counts(&g2, 1).unwrap());
    }
}

#[test]
fn ordering_and_monotonicity_on_random_programs() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let src = common::random_program(&mut rng, 4);
        let graph = build_cfg(&parse(&src).unwrap());
        let mut previous = None;
        for bound in 0..=2 {
            let c = coverage_counts(&graph, bound).unwrap();
            assert!(c.statement <= c.branch, "{src}");
            assert!(c.branch <= c.path, "{src}");
            assert!(c.statement >= 1);
            if let Some(p) = previous {
                assert!(c.path >= p, "{src}");
            }
            previous = Some(c.path);
            for m in TestingMethod::ALL {
                assert!(c.get(m) >= 1);
            }
        }
    }
}

#[test]
fn doubling_a_loop_bound_series() {
    // Two body paths per iteration, so 2^(b+1) - 1 paths at bound b.
    let src = "while a:\n    if b:\n        x = 1\n";
    let graph = build_cfg(&parse(src).unwrap());
    let paths: Vec<u64> = (0..5).map(|b| coverage_counts(&graph, b).unwrap().path).collect();
    assert_eq!(paths, vec![1, 3, 7, 15, 31]);
}
