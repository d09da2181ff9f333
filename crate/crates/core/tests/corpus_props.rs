use std::collections::BTreeSet;

use chrono::{NaiveDate, TimeZone, Utc};
use proptest::prelude::*;
use zhstance::corpus::{
    filter_accounts, fold_assignment, kfold_splits, split_corpus, AccountRecord, Corpus, DateWindow, SplitSpec, Tweet,
};

const LABELS: [&str; 2] = ["Beijing", "Democracy"];

/// (followers, label index or none, day offsets of tweets within 2021)
type AccountSpec = (u64, Option<usize>, Vec<u32>);

fn account_spec() -> impl Strategy<Value = AccountSpec> {
    (
        0u64..50_000,
        prop::option::weighted(0.9, 0usize..2),
        prop::collection::vec(0u32..200, 0..15),
    )
}

fn build(specs: &[AccountSpec]) -> Corpus {
    let accounts = specs
        .iter()
        .enumerate()
        .map(|(i, (followers, label, days))| AccountRecord {
            account_id: format!("acct{i:03}"),
            follower_count: *followers,
            label: label.map(|l| LABELS[l].to_string()),
            tweets: days
                .iter()
                .map(|&d| Tweet {
                    text: format!("t{d}"),
                    timestamp: Utc.with_ymd_and_hms(2021, 1, 1, 0, 0, 0).unwrap() + chrono::Duration::days(d as i64),
                })
                .collect(),
        })
        .collect();
    Corpus::new(LABELS.iter().map(|s| s.to_string()).collect(), accounts).unwrap()
}

fn ids(c: &Corpus) -> BTreeSet<String> {
    c.accounts().iter().map(|a| a.account_id.clone()).collect()
}

fn window(from: u32, len: u32) -> DateWindow {
    let start = NaiveDate::from_ymd_opt(2021, 1, 1).unwrap() + chrono::Duration::days(from as i64);
    DateWindow::new(start, start + chrono::Duration::days(len as i64)).unwrap()
}

proptest! {
    #[test]
    fn folds_partition_and_balance(specs in prop::collection::vec(account_spec(), 2..40), k in 2usize..8, seed: u64) {
        let c = build(&specs);
        prop_assume!(k <= c.len());
        let folds = kfold_splits(&c, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut seen = BTreeSet::new();
        for f in &folds {
            let v = ids(&f.validation);
            let t = ids(&f.train);
            prop_assert!(v.is_disjoint(&t));
            prop_assert_eq!(v.union(&t).cloned().collect::<BTreeSet<_>>(), ids(&c));
            for id in v {
                prop_assert!(seen.insert(id), "account in two validation folds");
            }
        }
        prop_assert_eq!(seen, ids(&c));
        let sizes: Vec<usize> = folds.iter().map(|f| f.validation.len()).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1, "sizes {:?}", sizes);
    }

    #[test]
    fn labeled_folds_are_stratified(specs in prop::collection::vec(account_spec(), 4..40), k in 2usize..5, seed: u64) {
        let specs: Vec<AccountSpec> = specs.into_iter().map(|(f, l, t)| (f, Some(l.unwrap_or(0)), t)).collect();
        let c = build(&specs);
        prop_assume!(k <= c.len());
        let folds = kfold_splits(&c, k, seed).unwrap();
        for label in LABELS {
            let per_fold: Vec<usize> = folds.iter().map(|f| f.validation.label_counts().get(label).copied().unwrap_or(0)).collect();
            prop_assert!(per_fold.iter().max().unwrap() - per_fold.iter().min().unwrap() <= 1, "{} {:?}", label, per_fold);
        }
    }

    #[test]
    fn assignment_depends_only_on_ids_k_seed(specs in prop::collection::vec(account_spec(), 2..30), k in 2usize..5, seed: u64) {
        let c = build(&specs);
        prop_assume!(k <= c.len());
        let mut reversed: Vec<AccountRecord> = c.accounts().to_vec();
        reversed.reverse();
        let shuffled = Corpus::new(c.label_set().to_vec(), reversed).unwrap();
        prop_assert_eq!(fold_assignment(&c, k, seed).unwrap(), fold_assignment(&shuffled, k, seed).unwrap());
    }

    #[test]
    fn split_partitions_corpus(specs in prop::collection::vec(account_spec(), 1..30), pick in prop::collection::vec(any::<bool>(), 30)) {
        let c = build(&specs);
        let test_ids: BTreeSet<String> = c
            .accounts()
            .iter()
            .zip(&pick)
            .filter(|(a, &p)| p && a.label.is_some())
            .map(|(a, _)| a.account_id.clone())
            .collect();
        let (non_test, test) = split_corpus(&c, &SplitSpec::new(test_ids.clone(), 2, 0).unwrap()).unwrap();
        prop_assert!(ids(&non_test).is_disjoint(&ids(&test)));
        prop_assert_eq!(ids(&non_test).union(&ids(&test)).cloned().collect::<BTreeSet<_>>(), ids(&c));
        prop_assert_eq!(ids(&test), test_ids);
    }

    #[test]
    fn raising_thresholds_never_adds_accounts(
        specs in prop::collection::vec(account_spec(), 0..30),
        f1 in 0u64..50_000, df in 0u64..20_000,
        t1 in 0usize..15, dt in 0usize..5,
        from in 0u32..100, len in 0u32..100, shrink in 0u32..50,
    ) {
        let c = build(&specs);
        let w = window(from, len + shrink);
        let base = ids(&filter_accounts(&c, f1, t1, w));
        for stricter in [
            filter_accounts(&c, f1 + df, t1, w),
            filter_accounts(&c, f1, t1 + dt, w),
            filter_accounts(&c, f1, t1, window(from, len)),
        ] {
            prop_assert!(ids(&stricter).is_subset(&base));
        }
    }
}

#[test]
fn different_seeds_usually_differ() {
    let specs: Vec<AccountSpec> = (0..20).map(|i| (20_000, Some(i % 2), vec![1, 2])).collect();
    let c = build(&specs);
    let a = fold_assignment(&c, 5, 0).unwrap();
    assert_eq!(a, fold_assignment(&c, 5, 0).unwrap());
    assert_ne!(a, fold_assignment(&c, 5, 1).unwrap());
}
