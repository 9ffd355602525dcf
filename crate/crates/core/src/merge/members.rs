//! Member-wise superimposition of three program texts.
//!
//! Each revision is cut into text chunks: a preamble, and per class a header,
//! its members (fields and methods, each with the comment and blank lines in
//! front of it) and a trailer. Chunks are matched across revisions by name and
//! merged independently; method chunks fall back to the line-based diff3.

use super::diff3::{merge_body_diff3, ConflictHunk};
use super::MergeError;
use crate::lang::ast::Program;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum MemberKind {
    Field,
    Method,
}

#[derive(Debug, Clone)]
pub(crate) struct MemberChunk {
    pub kind: MemberKind,
    pub name: String,
    pub lines: Vec<String>,
}

#[derive(Debug, Clone)]
pub(crate) struct ClassChunk {
    pub name: String,
    /// Blank/comment lines before the class, then the lines up to the opening brace.
    pub header: Vec<String>,
    pub members: Vec<MemberChunk>,
    /// Lines after the last member through the closing brace.
    pub trailer: Vec<String>,
}

#[derive(Debug, Clone)]
pub(crate) struct Layout {
    pub classes: Vec<ClassChunk>,
    /// Lines after the last class.
    pub epilogue: Vec<String>,
}

/// A conflict reported by the member-wise merge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MergeConflict {
    /// `Class`, `Class.member` or `<file>`.
    pub location: String,
    pub reason: String,
    pub hunks: Vec<ConflictHunk>,
}

fn slice(lines: &[String], first: u32, last: u32) -> Vec<String> {
    // 1-based inclusive; empty when first > last
    if first > last {
        return Vec::new();
    }
    lines[(first - 1) as usize..last as usize].to_vec()
}

pub(crate) fn layout(program: &Program, lines: &[String]) -> Result<Layout, MergeError> {
    let mut classes = Vec::new();
    let mut prev_end = 0u32;
    for class in &program.classes {
        let bad = |what: &str| MergeError::Layout { source_name: program.source_name.clone(), message: format!("{what} in class `{}`", class.name) };
        if class.span.first <= prev_end {
            return Err(bad("class starts on the line where the previous one ends"));
        }
        let header = slice(lines, prev_end + 1, class.body_open_line);
        let mut members: Vec<(u32, u32, MemberKind, &str)> = class
            .fields
            .iter()
            .map(|f| (f.span.first, f.span.last, MemberKind::Field, f.name.as_str()))
            .chain(class.methods.iter().map(|m| (m.span.first, m.span.last, MemberKind::Method, m.name.as_str())))
            .collect();
        members.sort();
        let mut cursor = class.body_open_line;
        let mut chunks = Vec::new();
        for (first, last, kind, name) in members {
            if first <= cursor {
                return Err(bad(&format!("member `{name}` shares a line with the preceding code")));
            }
            chunks.push(MemberChunk { kind, name: name.to_string(), lines: slice(lines, cursor + 1, last) });
            cursor = last;
        }
        if class.span.last <= cursor {
            return Err(bad("closing brace shares a line with the last member"));
        }
        let trailer = slice(lines, cursor + 1, class.span.last);
        classes.push(ClassChunk { name: class.name.clone(), header, members: chunks, trailer });
        prev_end = class.span.last;
    }
    let epilogue = slice(lines, prev_end + 1, lines.len() as u32);
    Ok(Layout { classes, epilogue })
}

/// What happened to one member, for later same-method detection.
#[derive(Debug, Clone, Default)]
pub(crate) struct MemberChanges {
    /// Methods present in base whose text both sides changed.
    pub both_changed: Vec<String>,
    /// Methods where one side's only changes are deletions.
    pub deletion_only: Vec<String>,
}

enum Pick<T> {
    Take(T),
    Conflict,
}

/// Classic three-way choice on whole values.
fn pick3<T: PartialEq + Clone>(base: Option<&T>, left: Option<&T>, right: Option<&T>) -> Pick<Option<T>> {
    if left == base {
        Pick::Take(right.cloned())
    } else if right == base || left == right {
        Pick::Take(left.cloned())
    } else {
        Pick::Conflict
    }
}

pub(crate) fn merge_layouts(
    base: &Layout,
    left: &Layout,
    right: &Layout,
    conflicts: &mut Vec<MergeConflict>,
    changes: &mut MemberChanges,
) -> Vec<String> {
    let mut out = Vec::new();
    let class_names = ordered_keys(
        base.classes.iter().map(|c| c.name.clone()),
        left.classes.iter().map(|c| c.name.clone()),
        right.classes.iter().map(|c| c.name.clone()),
    );
    let find = |l: &Layout, name: &str| l.classes.iter().find(|c| c.name == name).cloned();
    for name in class_names {
        let (b, l, r) = (find(base, &name), find(left, &name), find(right, &name));
        match (&l, &r) {
            (Some(_), Some(_)) => {}
            // Deleted by one side: accepted only when the other left it untouched.
            _ => {
                let flat = |c: &Option<ClassChunk>| c.as_ref().map(flatten);
                match pick3(flat(&b).as_ref(), flat(&l).as_ref(), flat(&r).as_ref()) {
                    Pick::Take(Some(text)) => out.extend(text),
                    Pick::Take(None) => {}
                    Pick::Conflict => conflicts.push(MergeConflict {
                        location: name.clone(),
                        reason: "class deleted on one side and changed on the other".into(),
                        hunks: Vec::new(),
                    }),
                }
                continue;
            }
        }
        let (l, r) = (l.unwrap(), r.unwrap());
        merge_text_part(&name, "header", b.as_ref().map(|c| c.header.clone()), l.header.clone(), r.header.clone(), conflicts, &mut out);
        let keys = ordered_keys(
            b.iter().flat_map(|c| c.members.iter().map(member_key)),
            l.members.iter().map(member_key),
            r.members.iter().map(member_key),
        );
        for key in keys {
            let get = |c: Option<&ClassChunk>| c.and_then(|c| c.members.iter().find(|m| member_key(m) == key).cloned());
            let (mb, ml, mr) = (get(b.as_ref()), get(Some(&l)), get(Some(&r)));
            merge_member(&name, mb, ml, mr, conflicts, changes, &mut out);
        }
        merge_text_part(&name, "trailer", b.as_ref().map(|c| c.trailer.clone()), l.trailer.clone(), r.trailer.clone(), conflicts, &mut out);
    }
    merge_text_part("<file>", "epilogue", Some(base.epilogue.clone()), left.epilogue.clone(), right.epilogue.clone(), conflicts, &mut out);
    out
}

fn merge_text_part(
    owner: &str,
    part: &str,
    base: Option<Vec<String>>,
    left: Vec<String>,
    right: Vec<String>,
    conflicts: &mut Vec<MergeConflict>,
    out: &mut Vec<String>,
) {
    let base = base.unwrap_or_default();
    match merge_body_diff3(&base, &left, &right) {
        Ok(lines) => out.extend(lines),
        Err(hunks) => conflicts.push(MergeConflict { location: owner.to_string(), reason: format!("conflicting {part}"), hunks }),
    }
}

fn merge_member(
    class: &str,
    base: Option<MemberChunk>,
    left: Option<MemberChunk>,
    right: Option<MemberChunk>,
    conflicts: &mut Vec<MergeConflict>,
    changes: &mut MemberChanges,
    out: &mut Vec<String>,
) {
    let any = base.as_ref().or(left.as_ref()).or(right.as_ref()).expect("member present somewhere");
    let location = format!("{class}.{}", any.name);
    let kind = any.kind;
    let text = |m: &Option<MemberChunk>| m.as_ref().map(|m| m.lines.clone());
    let (tb, tl, tr) = (text(&base), text(&left), text(&right));

    if let (MemberKind::Method, Some(b), Some(l), Some(r)) = (kind, &tb, &tl, &tr) {
        if l != b && r != b {
            changes.both_changed.push(location.clone());
            let only_deletes = |side: &Vec<String>| super::diff3::hunks(b, side).iter().all(|h| h.is_deletion());
            if only_deletes(l) || only_deletes(r) {
                changes.deletion_only.push(location.clone());
            }
        }
    }

    match pick3(tb.as_ref(), tl.as_ref(), tr.as_ref()) {
        Pick::Take(Some(lines)) => out.extend(lines),
        Pick::Take(None) => {}
        Pick::Conflict => match (kind, tb, tl, tr) {
            (MemberKind::Method, Some(b), Some(l), Some(r)) => match merge_body_diff3(&b, &l, &r) {
                Ok(lines) => out.extend(lines),
                Err(hunks) => conflicts.push(MergeConflict { location, reason: "overlapping edits".into(), hunks }),
            },
            (_, b, l, r) => {
                let reason = match (&b, &l, &r) {
                    (None, _, _) => "added on both sides with different text",
                    (Some(_), None, _) | (Some(_), _, None) => "deleted on one side and changed on the other",
                    _ => "field changed differently on both sides",
                };
                conflicts.push(MergeConflict { location, reason: reason.into(), hunks: Vec::new() });
            }
        },
    }
}

/// Identity of one piece of a laid-out file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum ChunkKey {
    Header(String),
    Member(String, MemberKind, String),
    Trailer(String),
    Epilogue,
}

/// The pieces of a layout in file order; their concatenation is the whole file.
pub(crate) fn keyed_chunks(layout: &Layout) -> Vec<(ChunkKey, &[String])> {
    let mut out: Vec<(ChunkKey, &[String])> = Vec::new();
    for c in &layout.classes {
        out.push((ChunkKey::Header(c.name.clone()), &c.header));
        for m in &c.members {
            out.push((ChunkKey::Member(c.name.clone(), m.kind, m.name.clone()), &m.lines));
        }
        out.push((ChunkKey::Trailer(c.name.clone()), &c.trailer));
    }
    out.push((ChunkKey::Epilogue, &layout.epilogue));
    out
}

fn member_key(m: &MemberChunk) -> (MemberKind, String) {
    (m.kind, m.name.clone())
}

/// Base order, then keys new in left, then keys new in right.
fn ordered_keys<K: Ord + Clone>(
    base: impl Iterator<Item = K>,
    left: impl Iterator<Item = K>,
    right: impl Iterator<Item = K>,
) -> Vec<K> {
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for k in base.chain(left).chain(right) {
        if seen.insert(k.clone(), ()).is_none() {
            out.push(k);
        }
    }
    out
}

fn flatten(c: &ClassChunk) -> Vec<String> {
    let mut v = c.header.clone();
    for m in &c.members {
        v.extend(m.lines.iter().cloned());
    }
    v.extend(c.trailer.iter().cloned());
    v
}
