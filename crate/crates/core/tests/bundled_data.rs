mod common;

use std::collections::BTreeSet;

use common::*;
use zhstance::corpus::{load_corpus, split_corpus, Corpus, SplitSpec};
use zhstance::pipeline::{cross_validate, Pipeline, TrainedModel};
use zhstance::segmenter::{load_hmm, load_lexicon, segment};
use zhstance::zh_convert::{load_conversion_table, to_simplified, ConversionTable};

fn table() -> ConversionTable {
    load_conversion_table(data_dir().join("ts_table.txt")).unwrap()
}

fn documented_non_idempotent() -> Vec<(String, String, String)> {
    std::fs::read_to_string(data_dir().join("ts_non_idempotent.txt"))
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            (f[0].to_string(), f[1].to_string(), f[2].to_string())
        })
        .collect()
}

#[test]
fn conversion_idempotent_except_documented_pairs() {
    let table = table();
    let mut bad: Vec<(String, String, String)> = table
        .pairs()
        .filter_map(|(k, _)| {
            let once = to_simplified(&k, &table);
            let twice = to_simplified(&once, &table);
            (once != twice).then_some((k, once, twice))
        })
        .collect();
    bad.sort();
    assert_eq!(bad, documented_non_idempotent());
}

#[test]
fn conversion_idempotent_on_fixture_text() {
    let table = table();
    let corpus = load_corpus(data_dir().join("fixture/corpus.jsonl")).unwrap();
    for tweet in corpus.accounts().iter().flat_map(|a| &a.tweets) {
        let once = to_simplified(&tweet.text, &table);
        assert_eq!(to_simplified(&once, &table), once, "{}", tweet.text);
    }
}

#[test]
fn unmapped_characters_pass_through() {
    let table = table();
    for s in [
        "hello, world 123",
        "我们今天去看足球",
        "🙂 #tag @user https://t.co/x",
        "ｆｕｌｌｗｉｄｔｈ",
    ] {
        assert_eq!(to_simplified(s, &table), s);
    }
    assert_eq!(to_simplified("體育場 ok", &table), "体育场 ok");
}

#[test]
fn bundled_models_segment_mixed_text() {
    let lex = load_lexicon(data_dir().join("lexicon.txt")).unwrap();
    let hmm = load_hmm(data_dir().join("hmm.json")).unwrap();
    assert!(lex.len() >= 30_000);
    let table = table();
    let text = to_simplified("我們今天去體育場看足球比賽 https://t.co/abc @fifa #冠軍", &table);
    let toks = segment(&text, &lex, Some(&hmm));
    assert_eq!(
        toks.as_slice(),
        ["我们", "今天", "去", "体育场", "看", "足球", "比赛", "冠军"]
    );
}

#[test]
fn fixture_words_are_in_lexicon() {
    let lex = load_lexicon(data_dir().join("lexicon.txt")).unwrap();
    let words = include_str!("../../../scripts/fixture_words.txt");
    for w in words
        .lines()
        .filter(|l| !l.starts_with('#'))
        .flat_map(str::split_whitespace)
    {
        assert!(lex.contains(w), "{w}");
    }
}

fn non_test(pipeline: &Pipeline) -> Corpus {
    let corpus = pipeline.load_filtered_corpus().unwrap();
    let spec = SplitSpec::new(pipeline.test_ids().unwrap(), 5, 0).unwrap();
    split_corpus(&corpus, &spec).unwrap().0
}

fn knn_parts(m: &TrainedModel) -> (&zhstance::vectorize::TfIdfModel, &[zhstance::classify::TrainingDoc]) {
    match m {
        TrainedModel::Knn { idf, train, .. } => (idf, train),
        other => panic!("expected a k-NN model, got {other:?}"),
    }
}

/// Injecting a term into one validation account changes nothing about the
/// model trained for that fold.
#[test]
fn validation_only_terms_do_not_reach_the_fold_model() {
    let pipeline = Pipeline::from_config(fixture_config()).unwrap();
    let base_corpus = non_test(&pipeline);
    let base = cross_validate(&base_corpus, 5, 0, &pipeline).unwrap();

    for fold in &base.folds {
        let target = &fold.validation_ids[0];
        let accounts = base_corpus
            .accounts()
            .iter()
            .cloned()
            .map(|mut a| {
                if &a.account_id == target {
                    a.tweets[0].text.push_str(" leakcanary");
                }
                a
            })
            .collect();
        let altered = Corpus::new(base_corpus.label_set().to_vec(), accounts).unwrap();
        let rerun = cross_validate(&altered, 5, 0, &pipeline).unwrap();
        let same = &rerun.folds[fold.fold];
        assert_eq!(same.validation_ids, fold.validation_ids);
        assert_eq!(knn_parts(&same.model), knn_parts(&fold.model), "fold {}", fold.fold);
        assert!(!knn_parts(&same.model).0.contains("leakcanary"));
        // the term does reach the models of folds that train on the account
        let trained_on: BTreeSet<usize> = rerun
            .folds
            .iter()
            .filter(|f| f.train_ids.contains(target))
            .map(|f| f.fold)
            .collect();
        assert_eq!(trained_on.len(), 4);
        for f in trained_on {
            assert!(knn_parts(&rerun.folds[f].model).0.contains("leakcanary"));
        }
    }
}
