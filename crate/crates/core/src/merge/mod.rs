//! Three-way merge of base/left/right programs, per-line attribution of the
//! merged text, and detection of methods edited by both contributions.

pub mod diff3;
mod members;

pub use diff3::{merge_body_diff3, ConflictHunk, Hunk};
pub use members::{MemberKind, MergeConflict};

use crate::lang::{self, ast::Program, FrontendError, ResolvedProgram};
use diff3::{line_matching, split_lines};
use log::debug;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Side {
    Base,
    Left,
    Right,
    Merged,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Base => "base",
            Side::Left => "left",
            Side::Right => "right",
            Side::Merged => "merged",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MergeError {
    #[error("{side} revision: {error}")]
    Frontend { side: Side, error: FrontendError },
    #[error("{source_name}: {message}")]
    Layout { source_name: String, message: String },
}

/// One parsed revision.
#[derive(Debug, Clone)]
pub struct Revision {
    pub text: String,
    pub program: Program,
}

/// A common ancestor and the two revisions derived from it.
#[derive(Debug, Clone)]
pub struct MergeScenario {
    pub base: Revision,
    pub left: Revision,
    pub right: Revision,
}

impl MergeScenario {
    /// Parses and resolves all three revisions.
    pub fn from_sources(base: &str, left: &str, right: &str) -> Result<Self, MergeError> {
        let load = |text: &str, side: Side| -> Result<Revision, MergeError> {
            let resolved = lang::load(text, &format!("{side}.mj")).map_err(|error| MergeError::Frontend { side, error })?;
            Ok(Revision { text: text.to_string(), program: resolved.ast })
        };
        Ok(Self { base: load(base, Side::Base)?, left: load(left, Side::Left)?, right: load(right, Side::Right)? })
    }

    /// Same scenario with the two contributions exchanged.
    pub fn swapped(&self) -> Self {
        Self { base: self.base.clone(), left: self.right.clone(), right: self.left.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Origin {
    Base,
    Left,
    Right,
}

/// Origin of every line of the merged text (index 0 is line 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LineAttribution {
    origins: Vec<Origin>,
}

impl LineAttribution {
    pub fn len(&self) -> usize {
        self.origins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.origins.is_empty()
    }

    /// Origin of a 1-based line; lines past the end are `Base`.
    pub fn origin(&self, line: u32) -> Origin {
        line.checked_sub(1).and_then(|i| self.origins.get(i as usize)).copied().unwrap_or(Origin::Base)
    }

    pub fn lines_of(&self, origin: Origin) -> BTreeSet<u32> {
        self.origins.iter().enumerate().filter(|(_, &o)| o == origin).map(|(i, _)| i as u32 + 1).collect()
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }
}

/// A method whose merged body holds lines from both contributions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MethodEdit {
    /// `Class.method`
    pub method: String,
    pub left_lines: BTreeSet<u32>,
    pub right_lines: BTreeSet<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DropReason {
    NoSourceOrSinkLines,
}

/// A method both sides changed that still does not qualify as a [`MethodEdit`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DroppedMethod {
    pub method: String,
    pub reason: DropReason,
}

#[derive(Debug, Clone, Serialize)]
pub struct MergeOutcome {
    pub merged_text: String,
    #[serde(skip)]
    pub merged: Option<ResolvedProgram>,
    pub conflicts: Vec<MergeConflict>,
    pub method_edits: Vec<MethodEdit>,
    pub dropped: Vec<DroppedMethod>,
    pub attribution: LineAttribution,
    /// Methods both sides changed textually (candidates for same-method edits).
    pub both_changed: Vec<String>,
    /// Methods where one side contributed only deletions, which the merged text cannot show.
    pub deletion_only: Vec<String>,
}

/// Member-wise merge of the scenario, followed by attribution and
/// same-method detection when the merge is clean.
pub fn merge_members(scenario: &MergeScenario) -> Result<MergeOutcome, MergeError> {
    let lines = |r: &Revision| split_lines(&r.text);
    let (bl, ll, rl) = (lines(&scenario.base), lines(&scenario.left), lines(&scenario.right));
    let base = members::layout(&scenario.base.program, &bl)?;
    let left = members::layout(&scenario.left.program, &ll)?;
    let right = members::layout(&scenario.right.program, &rl)?;

    let mut conflicts = Vec::new();
    let mut changes = members::MemberChanges::default();
    let merged_lines = members::merge_layouts(&base, &left, &right, &mut conflicts, &mut changes);
    let mut merged_text = merged_lines.join("\n");
    if !merged_lines.is_empty() {
        merged_text.push('\n');
    }

    let mut outcome = MergeOutcome {
        merged_text,
        merged: None,
        conflicts,
        method_edits: Vec::new(),
        dropped: Vec::new(),
        attribution: LineAttribution { origins: Vec::new() },
        both_changed: changes.both_changed,
        deletion_only: changes.deletion_only,
    };
    if !outcome.conflicts.is_empty() {
        debug!("merge produced {} conflict(s)", outcome.conflicts.len());
        return Ok(outcome);
    }
    let resolved =
        lang::load(&outcome.merged_text, "merged.mj").map_err(|error| MergeError::Frontend { side: Side::Merged, error })?;
    outcome.attribution = attribute_lines(scenario, &outcome.merged_text);
    outcome.merged = Some(resolved);
    let (edits, dropped) = find_same_method_edits(&outcome);
    outcome.method_edits = edits;
    outcome.dropped = dropped;
    Ok(outcome)
}

/// Blame-style attribution of every merged line.
///
/// A merged line is matched against each side by a line diff. It belongs to a
/// side when it matches a line that side added relative to base. Lines that
/// match an unchanged line of either side, and lines both sides added
/// identically at the same place, are `Base`. Diffs are taken per class
/// header, member and trailer, so a line is only ever matched against the
/// same member of another revision.
pub fn attribute_lines(scenario: &MergeScenario, merged_text: &str) -> LineAttribution {
    let merged = split_lines(merged_text);
    let texts = [&scenario.base.text, &scenario.left.text, &scenario.right.text];
    let layouts: Option<Vec<(Vec<String>, members::Layout)>> = [&scenario.base.program, &scenario.left.program, &scenario.right.program]
        .into_iter()
        .zip(texts)
        .map(|(p, t)| {
            let lines = split_lines(t);
            members::layout(p, &lines).ok().map(|l| (lines, l))
        })
        .collect();
    let merged_layout = lang::parse_named(merged_text, "merged.mj").ok().and_then(|p| members::layout(&p, &merged).ok());

    let origins = match (layouts, merged_layout) {
        (Some(revs), Some(ml)) => {
            let lookup: Vec<BTreeMap<members::ChunkKey, &[String]>> =
                revs.iter().map(|(_, l)| members::keyed_chunks(l).into_iter().collect()).collect();
            let get = |i: usize, k: &members::ChunkKey| lookup[i].get(k).copied().unwrap_or(&[]);
            let mut origins = Vec::with_capacity(merged.len());
            for (key, lines) in members::keyed_chunks(&ml) {
                origins.extend(attribute_block(get(0, &key), get(1, &key), get(2, &key), lines));
            }
            origins
        }
        _ => attribute_block(&split_lines(texts[0]), &split_lines(texts[1]), &split_lines(texts[2]), &merged),
    };
    LineAttribution { origins }
}

fn attribute_block(base: &[String], left: &[String], right: &[String], merged: &[String]) -> Vec<Origin> {
    let side_view = |side: &[String]| -> (Vec<Option<usize>>, Vec<bool>) {
        let added: Vec<bool> = line_matching(base, side).iter().map(Option::is_none).collect();
        (line_matching(side, merged), added)
    };
    let (to_left, left_added) = side_view(left);
    let (to_right, right_added) = side_view(right);
    (0..merged.len())
        .map(|i| {
            let l = to_left[i].map(|j| left_added[j]);
            let r = to_right[i].map(|j| right_added[j]);
            match (l, r) {
                (Some(false), _) | (_, Some(false)) => Origin::Base,
                (Some(true), Some(true)) => Origin::Base,
                (Some(true), None) => Origin::Left,
                (None, Some(true)) => Origin::Right,
                (None, None) => Origin::Base,
            }
        })
        .collect()
}

/// One [`MethodEdit`] per merged method whose span holds both LEFT and RIGHT
/// lines. Methods both sides changed that fail this are returned as dropped.
pub fn find_same_method_edits(outcome: &MergeOutcome) -> (Vec<MethodEdit>, Vec<DroppedMethod>) {
    let Some(program) = outcome.merged.as_ref() else {
        return (Vec::new(), Vec::new());
    };
    if !outcome.conflicts.is_empty() {
        return (Vec::new(), Vec::new());
    }
    let left = outcome.attribution.lines_of(Origin::Left);
    let right = outcome.attribution.lines_of(Origin::Right);
    let mut edits = Vec::new();
    let mut seen = BTreeMap::new();
    for m in &program.methods {
        let within = |lines: &BTreeSet<u32>| lines.range(m.span.first..=m.span.last).copied().collect::<BTreeSet<u32>>();
        let (l, r) = (within(&left), within(&right));
        let qualified = m.qualified_name.clone();
        if !l.is_empty() && !r.is_empty() {
            seen.insert(qualified.clone(), ());
            edits.push(MethodEdit { method: qualified, left_lines: l, right_lines: r });
        }
    }
    let dropped = outcome
        .both_changed
        .iter()
        .filter(|m| !seen.contains_key(*m) && program.method_named(m).is_some())
        .map(|m| {
            debug!("dropping {m}: one contribution has no remaining lines");
            DroppedMethod { method: m.clone(), reason: DropReason::NoSourceOrSinkLines }
        })
        .collect();
    (edits, dropped)
}

#[cfg(test)]
mod tests;
