//! Robustness metrics over judgment matrices: per-condition accuracy,
//! signed degradation against the same-paradigm original, MAD at several
//! grouping levels, and direction classes.
//!
//! Values are kept at full precision; rounding happens in [`render`].

mod render;
mod sweep;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;
use crate::judge::{JudgmentMatrix, Paradigm, Verdict};
use crate::language::Language;
use crate::transforms::BiasKind;

pub use render::{
    fmt_plain, fmt_signed, mad_from_csv, mad_to_csv, records_from_csv, records_to_csv, render_mad_line, render_table,
    report_from_csv, report_to_csv, round1,
};
pub use sweep::{sweep_summary, sweep_to_csv, SweepFamily, SweepPoint};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no {label} items in condition {key}")]
    EmptyGroup { key: String, label: Label },
    #[error("empty input")]
    EmptyInput,
    #[error("no original baseline for {0}")]
    MissingBaseline(String),
    #[error("condition {0} appears more than once")]
    DuplicateCondition(String),
    #[error("item {item} in {key} has conflicting labels")]
    LabelConflict { key: String, item: String },
    #[error("inconsistent sweep: {0}")]
    InconsistentKeys(String),
    #[error("csv: {0}")]
    Csv(String),
}

/// Either the unmodified samples or one bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Original,
    Biased(BiasKind),
}

impl Condition {
    pub fn bias(self) -> Option<BiasKind> {
        match self {
            Condition::Original => None,
            Condition::Biased(b) => Some(b),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Original => f.write_str("original"),
            Condition::Biased(b) => b.fmt(f),
        }
    }
}

impl FromStr for Condition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "original" => Ok(Condition::Original),
            other => other.parse().map(Condition::Biased).map_err(|e| e.to_string()),
        }
    }
}

impl Serialize for Condition {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Field order gives the report order: judge, language, condition, paradigm.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConditionKey {
    pub judge_id: String,
    pub language: Language,
    pub condition: Condition,
    pub paradigm: Paradigm,
}

impl ConditionKey {
    pub fn baseline(&self) -> ConditionKey {
        ConditionKey { condition: Condition::Original, ..self.clone() }
    }
}

impl fmt::Display for ConditionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}/{}", self.judge_id, self.language.as_str(), self.condition, self.paradigm)
    }
}

/// One judge verdict on one item, flattened with its condition. This is the
/// unit persisted by evaluation and read back by reporting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub judge_id: String,
    pub language: Language,
    pub condition: Condition,
    pub paradigm: Paradigm,
    /// Base sample id, shared by an item's original and biased versions.
    pub item_id: String,
    pub label: Label,
    pub trial_index: u32,
    pub verdict: Verdict,
}

impl JudgmentRecord {
    pub fn key(&self) -> ConditionKey {
        ConditionKey {
            judge_id: self.judge_id.clone(),
            language: self.language,
            condition: self.condition,
            paradigm: self.paradigm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemScore {
    pub item_id: String,
    pub label: Label,
    /// Trials judged in agreement with the label.
    pub hits: u32,
    pub trials: u32,
}

impl ItemScore {
    pub fn score(&self) -> f64 {
        self.hits as f64 / self.trials as f64
    }
}

/// Per-item scores for one condition.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionScores {
    pub key: ConditionKey,
    pub items: Vec<ItemScore>,
}

impl ConditionScores {
    /// Scores from a judged matrix. The matrix's items must all be in
    /// `language`.
    pub fn from_matrix(matrix: &JudgmentMatrix, language: Language, condition: Condition) -> Self {
        let key = ConditionKey { judge_id: matrix.judge_id.clone(), language, condition, paradigm: matrix.paradigm };
        let mut counts: BTreeMap<&str, (u32, u32)> = BTreeMap::new();
        for j in &matrix.judgments {
            let e = counts.entry(j.item_id.as_str()).or_default();
            e.1 += 1;
            if matrix.labels.get(&j.item_id).is_some_and(|l| j.verdict.matches(*l)) {
                e.0 += 1;
            }
        }
        let items = counts
            .into_iter()
            .filter_map(|(id, (hits, trials))| {
                matrix.labels.get(id).map(|&label| ItemScore { item_id: id.to_string(), label, hits, trials })
            })
            .collect();
        ConditionScores { key, items }
    }
}

/// Group flat records by condition and average each item's trials. An
/// unparseable verdict never matches a label, so it scores as wrong.
pub fn scores_from_records(records: &[JudgmentRecord]) -> Result<Vec<ConditionScores>, MetricsError> {
    let mut grouped: BTreeMap<ConditionKey, BTreeMap<&str, (Label, u32, u32)>> = BTreeMap::new();
    for r in records {
        let key = r.key();
        let items = grouped.entry(key.clone()).or_default();
        let e = items.entry(r.item_id.as_str()).or_insert((r.label, 0, 0));
        if e.0 != r.label {
            return Err(MetricsError::LabelConflict { key: key.to_string(), item: r.item_id.clone() });
        }
        e.2 += 1;
        if r.verdict.matches(r.label) {
            e.1 += 1;
        }
    }
    Ok(grouped
        .into_iter()
        .map(|(key, items)| ConditionScores {
            key,
            items: items
                .into_iter()
                .map(|(id, (label, hits, trials))| ItemScore { item_id: id.to_string(), label, hits, trials })
                .collect(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionStats {
    pub acc_correct: f64,
    pub acc_incorrect: f64,
    pub n_correct: usize,
    pub n_incorrect: usize,
}

/// Mean score per label. The mean is exact before the final conversion, so
/// equal accuracies give equal floats whatever the item order or trial mix.
pub fn accuracy(items: &[ItemScore]) -> Result<ConditionStats, MetricsError> {
    let mean = |label: Label| {
        let group: Vec<&ItemScore> = items.iter().filter(|i| i.label == label && i.trials > 0).collect();
        let n = group.len();
        let sum = group
            .iter()
            .fold(Ratio::<u128>::from_integer(0), |acc, i| acc + Ratio::new(u128::from(i.hits), u128::from(i.trials)));
        (n, (n > 0).then(|| ratio_to_f64(sum / Ratio::from_integer(n as u128))))
    };
    let (n_correct, acc_correct) = mean(Label::Correct);
    let (n_incorrect, acc_incorrect) = mean(Label::Incorrect);
    match (acc_correct, acc_incorrect) {
        (Some(acc_correct), Some(acc_incorrect)) => {
            Ok(ConditionStats { acc_correct, acc_incorrect, n_correct, n_incorrect })
        }
        (None, _) => Err(MetricsError::EmptyGroup { key: String::new(), label: Label::Correct }),
        (_, None) => Err(MetricsError::EmptyGroup { key: String::new(), label: Label::Incorrect }),
    }
}

fn ratio_to_f64(r: Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Signed accuracy change in percentage points.
pub fn degradation(acc_original: f64, acc_biased: f64) -> f64 {
    (acc_biased - acc_original) * 100.0
}

/// Mean absolute value.
pub fn mad(deltas: &[f64]) -> Result<f64, MetricsError> {
    if deltas.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(deltas.iter().map(|d| d.abs()).sum::<f64>() / deltas.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Positive,
    Negative,
    Mixed,
    Neutral,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Positive, Direction::Negative, Direction::Mixed, Direction::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Positive => "positive",
            Direction::Negative => "negative",
            Direction::Mixed => "mixed",
            Direction::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Positive pushes towards "correct" (up on correct code, down on incorrect
/// code); negative is the reverse.
pub fn classify_direction(delta_correct: f64, delta_incorrect: f64, dead_band: f64) -> Direction {
    let band = dead_band.abs();
    if delta_correct > band && delta_incorrect < -band {
        Direction::Positive
    } else if delta_correct < -band && delta_incorrect > band {
        Direction::Negative
    } else if delta_correct.abs() <= band && delta_incorrect.abs() <= band {
        Direction::Neutral
    } else {
        Direction::Mixed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub key: ConditionKey,
    pub stats: ConditionStats,
    pub delta_correct: f64,
    pub delta_incorrect: f64,
    /// `None` for original conditions.
    pub direction: Option<Direction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    /// One judge and language, one label side, across biases.
    Row,
    Bias,
    Language,
    Judge,
    JudgeBias,
    Overall,
}

/// MAD over the biased rows selected by the populated fields. Except for
/// `Row`, both the correct-side and incorrect-side deltas of each row count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MadEntry {
    pub paradigm: Paradigm,
    pub grouping: Grouping,
    pub judge_id: Option<String>,
    pub language: Option<Language>,
    pub bias: Option<BiasKind>,
    pub side: Option<Label>,
    pub n: usize,
    pub mad: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub dead_band: f64,
    /// Sorted by key.
    pub rows: Vec<ReportRow>,
    pub mads: Vec<MadEntry>,
}

impl RobustnessReport {
    pub fn row(&self, key: &ConditionKey) -> Option<&ReportRow> {
        self.rows.binary_search_by(|r| r.key.cmp(key)).ok().map(|i| &self.rows[i])
    }

    pub fn paradigms(&self) -> BTreeSet<Paradigm> {
        self.rows.iter().map(|r| r.key.paradigm).collect()
    }

    pub fn mad_for(&self, paradigm: Paradigm, grouping: Grouping) -> impl Iterator<Item = &MadEntry> {
        self.mads.iter().filter(move |m| m.paradigm == paradigm && m.grouping == grouping)
    }

    /// Rebuild a report from its rows (the MAD entries are derived).
    pub fn from_rows(mut rows: Vec<ReportRow>, dead_band: f64) -> Self {
        rows.sort_by(|a, b| a.key.cmp(&b.key));
        let mads = compute_mads(&rows);
        RobustnessReport { dead_band, rows, mads }
    }
}

/// Build the full report. Input order does not matter.
pub fn aggregate(conditions: &[ConditionScores], dead_band: f64) -> Result<RobustnessReport, MetricsError> {
    if conditions.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut stats: BTreeMap<&ConditionKey, ConditionStats> = BTreeMap::new();
    for c in conditions {
        let s = accuracy(&c.items).map_err(|e| match e {
            MetricsError::EmptyGroup { label, .. } => MetricsError::EmptyGroup { key: c.key.to_string(), label },
            other => other,
        })?;
        if stats.insert(&c.key, s).is_some() {
            return Err(MetricsError::DuplicateCondition(c.key.to_string()));
        }
    }
    let mut rows = Vec::with_capacity(stats.len());
    for (&key, &s) in &stats {
        let base = stats.get(&key.baseline()).ok_or_else(|| MetricsError::MissingBaseline(key.to_string()))?;
        let delta_correct = degradation(base.acc_correct, s.acc_correct);
        let delta_incorrect = degradation(base.acc_incorrect, s.acc_incorrect);
        let direction = match key.condition {
            Condition::Original => None,
            Condition::Biased(_) => Some(classify_direction(delta_correct, delta_incorrect, dead_band)),
        };
        rows.push(ReportRow { key: key.clone(), stats: s, delta_correct, delta_incorrect, direction });
    }
    Ok(RobustnessReport::from_rows(rows, dead_band))
}

/// Records straight to a report.
pub fn report_from_records(records: &[JudgmentRecord], dead_band: f64) -> Result<RobustnessReport, MetricsError> {
    aggregate(&scores_from_records(records)?, dead_band)
}

fn compute_mads(rows: &[ReportRow]) -> Vec<MadEntry> {
    let mut out = Vec::new();
    let paradigms: BTreeSet<Paradigm> = rows.iter().map(|r| r.key.paradigm).collect();
    for paradigm in paradigms {
        let in_paradigm: Vec<&ReportRow> = rows.iter().filter(|r| r.key.paradigm == paradigm).collect();
        let biased: Vec<&ReportRow> =
            in_paradigm.iter().copied().filter(|r| r.key.condition != Condition::Original).collect();
        let judges: BTreeSet<&str> = in_paradigm.iter().map(|r| r.key.judge_id.as_str()).collect();
        let languages: BTreeSet<Language> = in_paradigm.iter().map(|r| r.key.language).collect();
        let biases: BTreeSet<BiasKind> = biased.iter().filter_map(|r| r.key.condition.bias()).collect();
        let entry = |grouping, judge_id: Option<&str>, language, bias, side, deltas: Vec<f64>| {
            mad(&deltas).ok().map(|m| MadEntry {
                paradigm,
                grouping,
                judge_id: judge_id.map(str::to_string),
                language,
                bias,
                side,
                n: deltas.len(),
                mad: m,
            })
        };
        let both = |pred: &dyn Fn(&ReportRow) -> bool| -> Vec<f64> {
            biased.iter().filter(|r| pred(r)).flat_map(|r| [r.delta_correct, r.delta_incorrect]).collect()
        };

        for &j in &judges {
            for &l in &languages {
                for side in [Label::Correct, Label::Incorrect] {
                    let deltas: Vec<f64> = biased
                        .iter()
                        .filter(|r| r.key.judge_id == j && r.key.language == l)
                        .map(|r| if side == Label::Correct { r.delta_correct } else { r.delta_incorrect })
                        .collect();
                    out.extend(entry(Grouping::Row, Some(j), Some(l), None, Some(side), deltas));
                }
            }
        }
        for &b in &biases {
            out.extend(entry(
                Grouping::Bias,
                None,
                None,
                Some(b),
                None,
                both(&|r| r.key.condition == Condition::Biased(b)),
            ));
        }
        for &l in &languages {
            out.extend(entry(Grouping::Language, None, Some(l), None, None, both(&|r| r.key.language == l)));
        }
        for &j in &judges {
            out.extend(entry(Grouping::Judge, Some(j), None, None, None, both(&|r| r.key.judge_id == j)));
        }
        for &j in &judges {
            for &b in &biases {
                let deltas = both(&|r| r.key.judge_id == j && r.key.condition == Condition::Biased(b));
                out.extend(entry(Grouping::JudgeBias, Some(j), None, Some(b), None, deltas));
            }
        }
        out.extend(entry(Grouping::Overall, None, None, None, None, both(&|_| true)));
    }
    out
}
