//! Consistent renaming of variables and parameters to random alphabetic names.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{BiasKind, BiasVariant, Provenance, TransformError};
use crate::corpus::CodeSample;
use crate::language::Language;
use crate::rng::SeededRng;
use crate::syntax::{self, collect_renameable_identifiers};

const ALPHABET: &[u8; 52] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Up to this length the whole candidate space is enumerated.
const ENUMERATE_UP_TO: usize = 2;
/// Draws per name before giving up on longer lengths.
const MAX_DRAWS_PER_NAME: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenameMap {
    pub entries: BTreeMap<String, String>,
    pub length: usize,
    pub seed: u64,
}

impl RenameMap {
    pub fn inverse(&self) -> BTreeMap<String, String> {
        self.entries.iter().map(|(k, v)| (v.clone(), k.clone())).collect()
    }
}

/// `count` distinct alphabetic names of exactly `length` characters, none in
/// `forbidden`. Fails rather than returning fewer names.
pub fn generate_names(
    count: usize,
    length: usize,
    forbidden: &BTreeSet<String>,
    rng: &mut SeededRng,
) -> Result<Vec<String>, TransformError> {
    if length == 0 {
        return Err(TransformError::InvalidParameter("rename length must be at least 1".into()));
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    if length <= ENUMERATE_UP_TO {
        let candidates: Vec<String> = all_names(length).into_iter().filter(|n| !forbidden.contains(n)).collect();
        if candidates.len() < count {
            return Err(TransformError::NameSpaceExhausted { length, needed: count, available: candidates.len() });
        }
        return Ok(rng.sample_indices(candidates.len(), count).into_iter().map(|i| candidates[i].clone()).collect());
    }
    let mut taken: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut draws = 0;
        loop {
            let name: String = (0..length).map(|_| ALPHABET[rng.below(52) as usize] as char).collect();
            if !forbidden.contains(&name) && taken.insert(name.clone()) {
                out.push(name);
                break;
            }
            draws += 1;
            if draws >= MAX_DRAWS_PER_NAME {
                return Err(TransformError::NameSpaceExhausted { length, needed: count, available: out.len() });
            }
        }
    }
    Ok(out)
}

fn all_names(length: usize) -> Vec<String> {
    let mut names = vec![String::new()];
    for _ in 0..length {
        names = names
            .into_iter()
            .flat_map(|prefix| ALPHABET.iter().map(move |c| format!("{prefix}{}", *c as char)))
            .collect();
    }
    names
}

pub fn rename_variables(sample: &CodeSample, length: usize, seed: u64) -> Result<BiasVariant, TransformError> {
    let bias = BiasKind::VariableRename { length };
    bias.validate()?;
    let tree = syntax::parse(&sample.source, sample.language)?;
    let set = syntax::identifiers_of(&tree);
    let profile = sample.language.profile();
    let mut forbidden = tree.identifier_tokens();
    forbidden.extend(profile.reserved_words.iter().map(|s| s.to_string()));
    forbidden.extend(profile.builtins.iter().map(|s| s.to_string()));

    let originals: Vec<&String> = set.renameable.keys().collect();
    let mut rng = SeededRng::new(seed, &format!("{}/{bias}", sample.sample_id));
    let generated = generate_names(originals.len(), length, &forbidden, &mut rng)?;
    let entries: BTreeMap<String, String> = originals.iter().map(|s| (*s).clone()).zip(generated).collect();

    let source = rewrite(&sample.source, set.all_occurrences().into_iter().map(|(r, name)| (r, &entries[name])));
    let map = RenameMap { entries, length, seed };
    let provenance = Provenance { seed, rename_map: Some(map), ..Provenance::default() };
    Ok(BiasVariant::new(sample, bias, source, provenance))
}

fn rewrite<'a>(source: &str, edits: impl Iterator<Item = (std::ops::Range<usize>, &'a String)>) -> String {
    let mut out = String::with_capacity(source.len());
    let mut pos = 0;
    for (range, replacement) in edits {
        out.push_str(&source[pos..range.start]);
        out.push_str(replacement);
        pos = range.end;
    }
    out.push_str(&source[pos..]);
    out
}

/// Undo a rename by re-analysing the variant and mapping generated names
/// back. Fails if a generated name is not renameable in the variant, which
/// would mean the rename changed how the program binds names.
pub fn invert_rename(source: &str, language: Language, map: &RenameMap) -> Result<String, TransformError> {
    let set = collect_renameable_identifiers(source, language)?;
    let inverse = map.inverse();
    for generated in inverse.keys() {
        if !set.renameable.contains_key(generated) {
            return Err(TransformError::InvalidParameter(format!(
                "generated name `{generated}` is not a renameable identifier in the variant"
            )));
        }
    }
    let edits = set.all_occurrences().into_iter().filter_map(|(r, name)| inverse.get(name).map(|orig| (r, orig)));
    Ok(rewrite(source, edits))
}
