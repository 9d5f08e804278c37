mod common;

use covquiz::bank::{Bank, BankError, LoadOptions, MethodCounts, SaveOptions};
use covquiz::flowgraph::TestingMethod;

#[test]
fn corpus_bank_survives_a_save_load_cycle() {
    let bank = common::corpus_bank();
    assert_eq!(bank.len(), 9);
    let dir = tempfile::tempdir().unwrap();
    for embed_graphs in [false, true] {
        let path = dir.path().join(format!("bank-{embed_graphs}.json"));
        bank.save(&path, SaveOptions { embed_graphs }).unwrap();
        let loaded = Bank::load(&path, LoadOptions::default()).unwrap();
        assert_eq!(loaded.len(), bank.len());
        for (a, b) in bank.items().iter().zip(loaded.items()) {
            assert_eq!(a.item_id, b.item_id);
            assert_eq!(a.counts, b.counts);
            assert_eq!(a.graph, b.graph);
            assert!(a.program.structurally_eq(&b.program));
        }
        assert_eq!(
            loaded.to_json(SaveOptions { embed_graphs }),
            bank.to_json(SaveOptions { embed_graphs })
        );
    }
}

#[test]
fn tampered_counts_are_caught_on_load() {
    let bank = common::corpus_bank();
    let text = bank.to_json(SaveOptions::default());
    let tampered = text.replacen("\"path\": 14", "\"path\": 13", 1);
    assert_ne!(text, tampered);
    match Bank::from_json(&tampered, LoadOptions::default()) {
        Err(BankError::VerificationFailure { id, stored, computed }) => {
            assert_eq!(id, "name_registry");
            assert_eq!(stored, (13, 2, 1));
            assert_eq!(computed, (14, 2, 1));
        }
        other => panic!("{other:?}"),
    }
    let trusted = Bank::from_json(
        &tampered,
        LoadOptions {
            no_verify: true,
            path_cap: None,
        },
    )
    .unwrap();
    assert_eq!(trusted.get("name_registry").unwrap().counts.path, 13);
}

#[test]
fn groups_partition_the_corpus() {
    let bank = common::corpus_bank();
    for m in TestingMethod::ALL {
        let groups = bank.groups(m);
        assert_eq!(groups.iter().map(|g| g.size()).sum::<usize>(), bank.len());
        for g in &groups {
            for id in &g.member_ids {
                assert_eq!(bank.get(id).unwrap().counts.get(m), g.count_value);
            }
        }
    }
    let sizes = |m| {
        bank.groups(m)
            .iter()
            .map(|g| (g.count_value, g.size()))
            .collect::<Vec<_>>()
    };
    assert_eq!(sizes(TestingMethod::BranchCoverage), vec![(1, 3), (2, 3), (3, 3)]);
    assert_eq!(sizes(TestingMethod::StatementCoverage), vec![(1, 4), (2, 2), (3, 3)]);
}

#[test]
fn renamed_copy_of_a_snippet_is_rejected() {
    let bank = common::corpus_bank();
    let (_, src) = &common::corpus()[0];
    assert!(matches!(
        bank.ingest(src, "copy"),
        Err(BankError::DuplicateProgram { .. })
    ));
    let spaced = src.replace(" = ", "  =  ");
    assert!(matches!(
        bank.ingest(&spaced, "copy"),
        Err(BankError::DuplicateProgram { .. })
    ));
}

#[test]
fn overrides_are_marked_and_persisted() {
    let bank = common::bank_with_counts(&[(2, 1, 1), (2, 1, 1)]);
    assert!(bank.items().iter().all(|i| i.counts_overridden));
    let back = Bank::from_json(&bank.to_json(SaveOptions::default()), LoadOptions::default()).unwrap();
    assert_eq!(
        back.get("i2").unwrap().counts,
        MethodCounts {
            path: 2,
            branch: 1,
            statement: 1
        }
    );
}
