//! CSV and text-table output for reports and judgment records.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use super::{
    Condition, ConditionKey, ConditionStats, Direction, Grouping, JudgmentRecord, MadEntry, MetricsError, ReportRow,
    RobustnessReport,
};
use crate::corpus::Label;
use crate::judge::Paradigm;
use crate::language::Language;
use crate::transforms::BiasKind;

/// Tenths, rounded half away from zero. Float noise below 1e-6 of a tenth
/// is ignored so that exact ties computed in floating point still round up.
pub fn round1(x: f64) -> i64 {
    let scaled = x * 10.0;
    let snapped = (scaled * 1e6).round() / 1e6;
    snapped.round() as i64
}

fn tenths(q: i64, sign: &str) -> String {
    format!("{sign}{}.{}", q.abs() / 10, q.abs() % 10)
}

/// One decimal, minus sign only.
pub fn fmt_plain(x: f64) -> String {
    let q = round1(x);
    tenths(q, if q < 0 { "-" } else { "" })
}

/// One decimal with an explicit sign; zero is unsigned.
pub fn fmt_signed(x: f64) -> String {
    let q = round1(x);
    match q.signum() {
        0 => "0.0".to_string(),
        1 => tenths(q, "+"),
        _ => tenths(q, "-"),
    }
}

/// `MAD by {what}: A 7.4, B 8.0`.
pub fn render_mad_line(what: &str, values: &[(String, f64)]) -> String {
    let parts: Vec<String> = values.iter().map(|(name, v)| format!("{name} {}", fmt_plain(*v))).collect();
    format!("MAD by {what}: {}", parts.join(", "))
}

fn to_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<String, MetricsError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(vec![]);
    for r in rows {
        w.serialize(r).map_err(|e| MetricsError::Csv(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| MetricsError::Csv(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| MetricsError::Csv(e.to_string()))
}

fn from_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>, MetricsError> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| MetricsError::Csv(format!("row {}: {e}", i + 1))))
        .collect()
}

pub fn records_to_csv(records: &[JudgmentRecord]) -> Result<String, MetricsError> {
    to_csv(records)
}

pub fn records_from_csv(text: &str) -> Result<Vec<JudgmentRecord>, MetricsError> {
    from_csv(text)
}

#[derive(Serialize, Deserialize)]
struct RowCsv {
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

/// One line per condition, full precision.
pub fn report_to_csv(report: &RobustnessReport) -> Result<String, MetricsError> {
    to_csv(report.rows.iter().map(|r| RowCsv {
        judge_id: r.key.judge_id.clone(),
        language: r.key.language,
        condition: r.key.condition,
        paradigm: r.key.paradigm,
        n_correct: r.stats.n_correct,
        n_incorrect: r.stats.n_incorrect,
        acc_correct: r.stats.acc_correct,
        acc_incorrect: r.stats.acc_incorrect,
        delta_correct: r.delta_correct,
        delta_incorrect: r.delta_incorrect,
        direction: r.direction,
    }))
}

pub fn report_from_csv(text: &str, dead_band: f64) -> Result<RobustnessReport, MetricsError> {
    let rows = from_csv::<RowCsv>(text)?
        .into_iter()
        .map(|r| ReportRow {
            key: ConditionKey {
                judge_id: r.judge_id,
                language: r.language,
                condition: r.condition,
                paradigm: r.paradigm,
            },
            stats: ConditionStats {
                acc_correct: r.acc_correct,
                acc_incorrect: r.acc_incorrect,
                n_correct: r.n_correct,
                n_incorrect: r.n_incorrect,
            },
            delta_correct: r.delta_correct,
            delta_incorrect: r.delta_incorrect,
            direction: r.direction,
        })
        .collect();
    Ok(RobustnessReport::from_rows(rows, dead_band))
}

#[derive(Serialize, Deserialize)]
struct MadCsv {
    paradigm: Paradigm,
    grouping: Grouping,
    judge_id: Option<String>,
    language: Option<Language>,
    bias: Option<BiasKind>,
    side: Option<Label>,
    n: usize,
    mad: f64,
}

pub fn mad_to_csv(report: &RobustnessReport) -> Result<String, MetricsError> {
    to_csv(report.mads.iter().map(|m| MadCsv {
        paradigm: m.paradigm,
        grouping: m.grouping,
        judge_id: m.judge_id.clone(),
        language: m.language,
        bias: m.bias,
        side: m.side,
        n: m.n,
        mad: m.mad,
    }))
}

pub fn mad_from_csv(text: &str) -> Result<Vec<MadEntry>, MetricsError> {
    Ok(from_csv::<MadCsv>(text)?
        .into_iter()
        .map(|m| MadEntry {
            paradigm: m.paradigm,
            grouping: m.grouping,
            judge_id: m.judge_id,
            language: m.language,
            bias: m.bias,
            side: m.side,
            n: m.n,
            mad: m.mad,
        })
        .collect())
}

/// Text table per paradigm: judges and languages down the side with a
/// correct and an incorrect line each, original accuracy then signed deltas
/// per bias, and the row MAD. Grouped MADs and direction counts follow.
pub fn render_table(report: &RobustnessReport) -> String {
    let mut sections = Vec::new();
    for paradigm in report.paradigms() {
        sections.push(render_paradigm(report, paradigm));
    }
    sections.join("\n")
}

fn render_paradigm(report: &RobustnessReport, paradigm: Paradigm) -> String {
    let rows: Vec<&ReportRow> = report.rows.iter().filter(|r| r.key.paradigm == paradigm).collect();
    let biases: BTreeSet<BiasKind> = rows.iter().filter_map(|r| r.key.condition.bias()).collect();
    let judges: BTreeSet<&str> = rows.iter().map(|r| r.key.judge_id.as_str()).collect();
    let languages: BTreeSet<Language> = rows.iter().map(|r| r.key.language).collect();
    let find = |j: &str, l: Language, c: Condition| {
        rows.iter().find(|r| r.key.judge_id == j && r.key.language == l && r.key.condition == c)
    };
    let row_mad = |j: &str, l: Language, side: Label| {
        report
            .mad_for(paradigm, Grouping::Row)
            .find(|m| m.judge_id.as_deref() == Some(j) && m.language == Some(l) && m.side == Some(side))
    };

    let mut header: Vec<String> = ["judge", "language", "label", "original"].map(String::from).to_vec();
    header.extend(biases.iter().map(|b| b.short_name()));
    header.push("MAD".into());
    let mut body: Vec<Vec<String>> = Vec::new();
    for &j in &judges {
        for &l in &languages {
            let Some(orig) = find(j, l, Condition::Original) else { continue };
            for side in [Label::Correct, Label::Incorrect] {
                let pick = |r: &ReportRow| if side == Label::Correct { r.delta_correct } else { r.delta_incorrect };
                let acc = if side == Label::Correct { orig.stats.acc_correct } else { orig.stats.acc_incorrect };
                let mut cells =
                    vec![j.to_string(), l.display_name().to_string(), side.to_string(), fmt_plain(acc * 100.0)];
                for &b in &biases {
                    cells.push(find(j, l, Condition::Biased(b)).map_or("-".into(), |r| fmt_signed(pick(r))));
                }
                cells.push(row_mad(j, l, side).map_or("-".into(), |m| fmt_plain(m.mad)));
                body.push(cells);
            }
        }
    }
    let widths: Vec<usize> = (0..header.len())
        .map(|i| std::iter::once(&header).chain(&body).map(|r| r[i].chars().count()).max().unwrap_or(0))
        .collect();
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| if i < 3 { format!("{c:<w$}", w = widths[i]) } else { format!("{c:>w$}", w = widths[i]) })
            .collect();
        parts.join("  ").trim_end().to_string()
    };

    let mut out = String::new();
    let _ = writeln!(out, "== {paradigm} ==");
    let _ = writeln!(out, "{}", line(&header));
    for cells in &body {
        let _ = writeln!(out, "{}", line(cells));
    }
    if biases.is_empty() {
        return out;
    }
    out.push('\n');
    let named = |g: Grouping, name: &dyn Fn(&MadEntry) -> String| -> Vec<(String, f64)> {
        report.mad_for(paradigm, g).map(|m| (name(m), m.mad)).collect()
    };
    let by_bias = named(Grouping::Bias, &|m| m.bias.map(|b| b.short_name()).unwrap_or_default());
    let by_language =
        named(Grouping::Language, &|m| m.language.map(|l| l.display_name().to_string()).unwrap_or_default());
    let by_judge = named(Grouping::Judge, &|m| m.judge_id.clone().unwrap_or_default());
    let _ = writeln!(out, "{}", render_mad_line("bias", &by_bias));
    let _ = writeln!(out, "{}", render_mad_line("language", &by_language));
    let _ = writeln!(out, "{}", render_mad_line("judge", &by_judge));
    if let Some(m) = report.mad_for(paradigm, Grouping::Overall).next() {
        let _ = writeln!(out, "MAD overall: {}", fmt_plain(m.mad));
    }
    let _ = writeln!(out, "Directions:");
    for &b in &biases {
        let dirs: Vec<Direction> =
            rows.iter().filter(|r| r.key.condition == Condition::Biased(b)).filter_map(|r| r.direction).collect();
        let counts: Vec<String> =
            Direction::ALL.iter().map(|d| format!("{d} {}", dirs.iter().filter(|x| *x == d).count())).collect();
        let _ = writeln!(out, "  {}: {}", b.short_name(), counts.join(", "));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(fmt_plain(31.25), "31.3");
        assert_eq!(fmt_plain(250.00000000000003 / 8.0), "31.3");
        assert_eq!(fmt_plain(249.99999999999997 / 8.0), "31.3");
        assert_eq!(fmt_signed(-0.04), "0.0");
        assert_eq!(fmt_signed(-26.7), "-26.7");
        assert_eq!(fmt_signed(8.333333333333334), "+8.3");
        assert_eq!(fmt_plain(-0.25), "-0.3");
    }

    #[test]
    fn language_mad_line() {
        let values: Vec<(String, f64)> = [
            (Language::Cpp, 7.4),
            (Language::Python, 8.0),
            (Language::Java, 7.8),
            (Language::JavaScript, 7.8),
            (Language::Go, 7.7),
        ]
        .iter()
        .map(|(l, v)| (l.display_name().to_string(), *v))
        .collect();
        assert_eq!(
            render_mad_line("language", &values),
            "MAD by language: C++ 7.4, Python 8.0, Java 7.8, JavaScript 7.8, Go 7.7"
        );
    }
}
