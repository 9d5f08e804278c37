mod common;

use covquiz::flowgraph::{build_cfg, coverage_counts, TestingMethod};
use covquiz::minilang::{canonical_text, parse};
use covquiz::psychometrics::pearson;
use covquiz::qgen::{formulate, QuestionType, QuizRng};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn program_text() -> impl Strategy<Value = String> {
    any::<u64>().prop_map(|seed| common::random_program(&mut ChaCha8Rng::seed_from_u64(seed), 4))
}

proptest! {
    #[test]
    fn parser_never_panics(src in "[a-z0-9 =<>:()\\[\\],.+\"\n-]{0,120}") {
        let _ = parse(&src);
    }

    #[test]
    fn indented_noise_never_panics(lines in prop::collection::vec(("[ ]{0,9}", "(if|while|for|else|elif|x|print)[ a-z0-9:=()]{0,12}"), 0..8)) {
        let src: String = lines.iter().map(|(ws, body)| format!("{ws}{body}\n")).collect();
        let _ = parse(&src);
    }

    #[test]
    fn canonical_text_is_a_fixed_point(src in program_text()) {
        let program = parse(&src).unwrap();
        let printed = canonical_text(&program);
        let again = parse(&printed).unwrap();
        prop_assert!(program.structurally_eq(&again));
        prop_assert_eq!(canonical_text(&again), printed);
    }

    #[test]
    fn statement_branch_path_ordering(src in program_text(), bound in 0u32..=2) {
        let c = coverage_counts(&build_cfg(&parse(&src).unwrap()), bound).unwrap();
        prop_assert!(1 <= c.statement && c.statement <= c.branch && c.branch <= c.path);
    }

    #[test]
    fn path_count_grows_with_the_loop_bound(src in program_text()) {
        let graph = build_cfg(&parse(&src).unwrap());
        let p: Vec<u64> = (0..=2).map(|b| coverage_counts(&graph, b).unwrap().path).collect();
        prop_assert!(p[0] <= p[1] && p[1] <= p[2]);
    }

    #[test]
    fn formulate_is_a_function_of_the_seed(seed in any::<u64>(), m in 0usize..3, t in 0usize..4) {
        let bank = common::corpus_bank();
        let (method, qtype) = (TestingMethod::ALL[m], QuestionType::ALL[t]);
        let a = formulate(&bank, method, qtype, &mut QuizRng::new(seed));
        let b = formulate(&bank, method, qtype, &mut QuizRng::new(seed));
        prop_assert_eq!(a.unwrap(), b.unwrap());
    }

    #[test]
    fn pearson_is_bounded_and_affine_invariant(
        x in prop::collection::vec(0u32..13, 3..40),
        y_seed in any::<u64>(),
        scale in 0.5f64..20.0,
        shift in -50.0f64..50.0,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(y_seed);
        let y: Vec<f64> = x.iter().map(|_| rand::Rng::gen_range(&mut rng, 0..13) as f64).collect();
        let x: Vec<f64> = x.into_iter().map(f64::from).collect();
        if let Ok(c) = pearson(&x, &y) {
            prop_assert!((-1.0..=1.0).contains(&c.r));
            let moved: Vec<f64> = x.iter().map(|v| v * scale + shift).collect();
            let c2 = pearson(&moved, &y).unwrap();
            prop_assert!((c.r - c2.r).abs() < 1e-9);
        }
    }
}
