//! Append-only record of finished judge calls, so an interrupted evaluation
//! picks up where it stopped.
//!
//! Each line is written with a single `write_all` and flushed. A torn last
//! line (from a kill mid-write) is ignored on load.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::judge::{Judgment, JudgmentSink, Paradigm, TestCaseSet};
use crate::metrics::Condition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "entry", rename_all = "snake_case")]
pub enum JournalEntry {
    Judgment { condition: Condition, judgment: Judgment },
    TestCases { set: TestCaseSet },
}

type Key = (String, Paradigm, u32);

pub struct Journal {
    path: PathBuf,
    file: Mutex<File>,
    judgments: HashMap<Key, Judgment>,
    test_cases: HashMap<String, TestCaseSet>,
}

impl Journal {
    /// Open (creating if needed) the journal at `path`, seeded with entries
    /// recovered from an earlier complete store.
    pub fn open(path: &Path, seed: impl IntoIterator<Item = JournalEntry>) -> io::Result<Self> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir)?;
        }
        let mut journal = Journal {
            path: path.to_path_buf(),
            file: Mutex::new(OpenOptions::new().create(true).append(true).open(path)?),
            judgments: HashMap::new(),
            test_cases: HashMap::new(),
        };
        for e in seed {
            journal.remember(e);
        }
        let text = fs::read_to_string(path)?;
        let mut offset = 0usize;
        let lines: Vec<&str> = text.split_inclusive('\n').collect();
        for (i, line) in lines.iter().enumerate() {
            match serde_json::from_str::<JournalEntry>(line.trim_end()) {
                Ok(e) => journal.remember(e),
                Err(e) if i + 1 == lines.len() => {
                    log::warn!("{}: dropping torn last line ({e})", path.display());
                    journal.file.get_mut().expect("journal lock").set_len(offset as u64)?;
                    return Ok(journal);
                }
                Err(e) => {
                    return Err(io::Error::new(
                        io::ErrorKind::InvalidData,
                        format!("{}:{}: {e}", path.display(), i + 1),
                    ))
                }
            }
            offset += line.len();
        }
        if !text.is_empty() && !text.ends_with('\n') {
            journal.file.get_mut().expect("journal lock").write_all(b"\n")?;
        }
        Ok(journal)
    }

    fn remember(&mut self, e: JournalEntry) {
        match e {
            // Failed calls are retried on resume.
            JournalEntry::Judgment { judgment, .. } if judgment.error.is_some() && judgment.raw_output.is_empty() => {}
            JournalEntry::Judgment { judgment, .. } => {
                self.judgments.insert((judgment.item_id.clone(), judgment.paradigm, judgment.trial_index), judgment);
            }
            JournalEntry::TestCases { set } if set.error.is_some() && set.raw_output.is_empty() => {}
            JournalEntry::TestCases { set } => {
                self.test_cases.insert(set.item_id.clone(), set);
            }
        }
    }

    pub fn append(&self, e: &JournalEntry) {
        let mut line = serde_json::to_string(e).expect("journal entries serialize");
        line.push('\n');
        let mut f = self.file.lock().expect("journal lock");
        if let Err(err) = f.write_all(line.as_bytes()).and_then(|_| f.flush()) {
            log::error!("{}: journal write failed: {err}", self.path.display());
        }
    }

    pub fn test_cases(&self, problem_id: &str) -> Option<&TestCaseSet> {
        self.test_cases.get(problem_id)
    }

    pub fn resumed(&self) -> usize {
        self.judgments.len()
    }

    pub fn sink(&self, condition: Condition) -> ConditionSink<'_> {
        ConditionSink { journal: self, condition }
    }

    /// Remove the journal once its contents are in the final store.
    pub fn finish(self) -> io::Result<()> {
        drop(self.file);
        fs::remove_file(&self.path)
    }
}

/// The journal as seen from one condition's evaluation.
pub struct ConditionSink<'a> {
    journal: &'a Journal,
    condition: Condition,
}

impl JudgmentSink for ConditionSink<'_> {
    fn lookup(&self, item_id: &str, paradigm: Paradigm, trial: u32) -> Option<Judgment> {
        self.journal.judgments.get(&(item_id.to_string(), paradigm, trial)).cloned()
    }

    fn record(&self, judgment: &Judgment) {
        self.journal.append(&JournalEntry::Judgment { condition: self.condition, judgment: judgment.clone() });
    }
}
