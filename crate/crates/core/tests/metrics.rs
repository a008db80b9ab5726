use std::collections::BTreeMap;
use std::path::PathBuf;

use bias_forge::corpus::Label;
use bias_forge::judge::Paradigm;
use bias_forge::language::Language;
use bias_forge::metrics::{
    aggregate, classify_direction, degradation, mad, mad_from_csv, mad_to_csv, records_from_csv, records_to_csv,
    render_table, report_from_csv, report_from_records, report_to_csv, scores_from_records, Condition, ConditionKey,
    ConditionScores, Direction, ItemScore, MadEntry,
};
use bias_forge::transforms::BiasKind;
use proptest::prelude::*;

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/metrics").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[derive(serde::Deserialize)]
struct ExpectedRow {
    judge_id: String,
    language: Language,
    condition: Condition,
    paradigm: Paradigm,
    n_correct: usize,
    n_incorrect: usize,
    acc_correct: f64,
    acc_incorrect: f64,
    delta_correct: f64,
    delta_incorrect: f64,
    direction: Option<Direction>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9
}

type MadKey = (Paradigm, String, Option<String>, Option<Language>, Option<BiasKind>, Option<Label>);

fn mad_key(m: &MadEntry) -> MadKey {
    (m.paradigm, format!("{:?}", m.grouping), m.judge_id.clone(), m.language, m.bias, m.side)
}

#[test]
fn fixture_matches_reference_values() {
    let records = records_from_csv(&fixture("judgments.csv")).unwrap();
    assert_eq!(records.len(), 2 * 2 * 7 * 8 * 3);
    let report = report_from_records(&records, 0.0).unwrap();
    let expected: Vec<ExpectedRow> =
        csv::Reader::from_reader(fixture("expected_rows.csv").as_bytes()).deserialize().map(Result::unwrap).collect();
    assert_eq!(report.rows.len(), 28);
    assert_eq!(report.rows.len(), expected.len());
    for (got, want) in report.rows.iter().zip(&expected) {
        let key = ConditionKey {
            judge_id: want.judge_id.clone(),
            language: want.language,
            condition: want.condition,
            paradigm: want.paradigm,
        };
        assert_eq!(got.key, key);
        assert_eq!((got.stats.n_correct, got.stats.n_incorrect), (want.n_correct, want.n_incorrect));
        assert!(close(got.stats.acc_correct, want.acc_correct), "{key}");
        assert!(close(got.stats.acc_incorrect, want.acc_incorrect), "{key}");
        assert!(close(got.delta_correct, want.delta_correct), "{key}");
        assert!(close(got.delta_incorrect, want.delta_incorrect), "{key}");
        assert_eq!(got.direction, want.direction, "{key}");
    }

    let want_mads = mad_from_csv(&fixture("expected_mad.csv")).unwrap();
    let got: BTreeMap<MadKey, &MadEntry> = report.mads.iter().map(|m| (mad_key(m), m)).collect();
    assert_eq!(got.len(), want_mads.len());
    for w in &want_mads {
        let g = got.get(&mad_key(w)).unwrap_or_else(|| panic!("missing {:?}", mad_key(w)));
        assert_eq!(g.n, w.n);
        assert!(close(g.mad, w.mad), "{:?}: {} vs {}", mad_key(w), g.mad, w.mad);
    }
}

#[test]
fn fixture_table_matches_golden_file() {
    let records = records_from_csv(&fixture("judgments.csv")).unwrap();
    let report = report_from_records(&records, 0.0).unwrap();
    assert_eq!(render_table(&report), fixture("table.txt"));
}

#[test]
fn report_csv_round_trips() {
    let records = records_from_csv(&fixture("judgments.csv")).unwrap();
    let report = report_from_records(&records, 0.0).unwrap();
    let back = report_from_csv(&report_to_csv(&report).unwrap(), 0.0).unwrap();
    assert_eq!(back, report);
    assert_eq!(mad_from_csv(&mad_to_csv(&report).unwrap()).unwrap(), report.mads);
    assert_eq!(records_from_csv(&records_to_csv(&records).unwrap()).unwrap(), records);
}

#[test]
fn unparseable_verdicts_score_as_wrong() {
    let text = "judge_id,language,condition,paradigm,item_id,label,trial_index,verdict\n\
                j,go,original,test_case_based,a,correct,0,unparseable\n\
                j,go,original,test_case_based,b,incorrect,0,incorrect\n";
    let scores = scores_from_records(&records_from_csv(text).unwrap()).unwrap();
    let by_id: BTreeMap<&str, f64> = scores[0].items.iter().map(|i| (i.item_id.as_str(), i.score())).collect();
    assert_eq!(by_id["a"], 0.0);
    assert_eq!(by_id["b"], 1.0);
}

fn conditions_strategy() -> impl Strategy<Value = Vec<ConditionScores>> {
    let biases = [
        Condition::Original,
        Condition::Biased(BiasKind::Authority),
        Condition::Biased(BiasKind::SelfDeclared),
        Condition::Biased(BiasKind::VariableRename { length: 8 }),
    ];
    proptest::collection::vec(proptest::collection::vec(0u32..=3, 4), biases.len() * 2).prop_map(move |cells| {
        let mut out = Vec::new();
        for (ji, judge) in ["a", "b"].iter().enumerate() {
            for (ci, c) in biases.iter().enumerate() {
                let scores = &cells[ji * biases.len() + ci];
                let items = scores
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| ItemScore {
                        item_id: format!("i{i}"),
                        label: if i % 2 == 0 { Label::Correct } else { Label::Incorrect },
                        hits: s,
                        trials: 3,
                    })
                    .collect();
                out.push(ConditionScores {
                    key: ConditionKey {
                        judge_id: judge.to_string(),
                        language: Language::Java,
                        condition: *c,
                        paradigm: Paradigm::Direct,
                    },
                    items,
                });
            }
        }
        out
    })
}

proptest! {
    #[test]
    fn degradation_of_equal_accuracies_is_zero(a in 0.0f64..=1.0) {
        prop_assert_eq!(degradation(a, a), 0.0);
    }

    #[test]
    fn mad_is_bounded(deltas in proptest::collection::vec(-100.0f64..100.0, 1..20)) {
        let m = mad(&deltas).unwrap();
        let max = deltas.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
        prop_assert!(m >= 0.0);
        prop_assert!(m <= max + 1e-12);
    }

    #[test]
    fn direction_is_antisymmetric(a in -50.0f64..50.0, b in -50.0f64..50.0, band in 0.0f64..5.0) {
        prop_assume!(a.abs() > band && b.abs() > band);
        let fwd = classify_direction(a, b, band);
        let rev = classify_direction(b, a, band);
        prop_assert_eq!(fwd == Direction::Positive, rev == Direction::Negative);
    }

    #[test]
    fn aggregate_is_permutation_invariant(conds in conditions_strategy(), seed in any::<u64>()) {
        let base = aggregate(&conds, 0.0).unwrap();
        let mut shuffled = conds.clone();
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
            shuffled[i].items.reverse();
        }
        prop_assert_eq!(aggregate(&shuffled, 0.0).unwrap(), base.clone());
        let back = report_from_csv(&report_to_csv(&base).unwrap(), 0.0).unwrap();
        prop_assert_eq!(back, base);
    }
}
