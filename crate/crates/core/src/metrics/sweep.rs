//! Parameter sweeps (rename length, dummy count) as ordered series.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Condition, MetricsError, RobustnessReport};
use crate::judge::Paradigm;
use crate::language::Language;
use crate::transforms::BiasKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    RenameLength,
    DummyCount,
}

impl SweepFamily {
    fn parameter(self, bias: BiasKind) -> Option<usize> {
        match (self, bias) {
            (SweepFamily::RenameLength, BiasKind::VariableRename { length }) => Some(length),
            (SweepFamily::DummyCount, BiasKind::IllusoryComplexity { count }) => Some(count),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub judge_id: String,
    pub language: Language,
    pub paradigm: Paradigm,
    pub parameter: usize,
    pub acc_correct: f64,
    pub acc_incorrect: f64,
    pub delta_correct: f64,
    pub delta_incorrect: f64,
}

/// One series per (judge, language, paradigm), each ordered by parameter.
/// Every series must cover the same parameter values.
pub fn sweep_summary(report: &RobustnessReport, family: SweepFamily) -> Result<Vec<SweepPoint>, MetricsError> {
    let mut series: BTreeMap<(String, Language, Paradigm), Vec<SweepPoint>> = BTreeMap::new();
    for r in &report.rows {
        let Condition::Biased(bias) = r.key.condition else { continue };
        let Some(parameter) = family.parameter(bias) else { continue };
        series.entry((r.key.judge_id.clone(), r.key.language, r.key.paradigm)).or_default().push(SweepPoint {
            judge_id: r.key.judge_id.clone(),
            language: r.key.language,
            paradigm: r.key.paradigm,
            parameter,
            acc_correct: r.stats.acc_correct,
            acc_incorrect: r.stats.acc_incorrect,
            delta_correct: r.delta_correct,
            delta_incorrect: r.delta_incorrect,
        });
    }
    if series.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let mut expected: Option<BTreeSet<usize>> = None;
    let mut out = Vec::new();
    for ((judge, language, paradigm), mut points) in series {
        points.sort_by_key(|p| p.parameter);
        let params: BTreeSet<usize> = points.iter().map(|p| p.parameter).collect();
        match &expected {
            None => expected = Some(params),
            Some(e) if *e != params => {
                return Err(MetricsError::InconsistentKeys(format!(
                    "{judge}/{}/{paradigm} covers {params:?}, others cover {e:?}",
                    language.as_str()
                )))
            }
            Some(_) => {}
        }
        out.extend(points);
    }
    Ok(out)
}

pub fn sweep_to_csv(points: &[SweepPoint]) -> Result<String, MetricsError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    for p in points {
        w.serialize(p).map_err(|e| MetricsError::Csv(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| MetricsError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| MetricsError::Csv(e.to_string()))
}
