//! Line diffs and the hunk-level three-way merge used for method bodies.

use serde::Serialize;
use similar::{capture_diff_slices, Algorithm, DiffOp};

/// Lines are compared after trailing-whitespace normalization.
pub fn normalize(line: &str) -> &str {
    line.trim_end()
}

pub fn split_lines(text: &str) -> Vec<String> {
    text.lines().map(|l| normalize(l).to_string()).collect()
}

/// A contiguous change of one side against base: base lines
/// `base_start..base_end` (0-based, end exclusive) become `lines`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Hunk {
    pub base_start: usize,
    pub base_end: usize,
    pub lines: Vec<String>,
}

impl Hunk {
    fn is_insertion(&self) -> bool {
        self.base_start == self.base_end
    }

    /// True when the hunk only removes base lines.
    pub fn is_deletion(&self) -> bool {
        self.lines.is_empty() && !self.is_insertion()
    }
}

/// Maps each `new` line index to the matching `old` line index, if any.
pub fn line_matching(old: &[String], new: &[String]) -> Vec<Option<usize>> {
    let mut out = vec![None; new.len()];
    for op in capture_diff_slices(Algorithm::Myers, old, new) {
        if let DiffOp::Equal { old_index, new_index, len } = op {
            for k in 0..len {
                out[new_index + k] = Some(old_index + k);
            }
        }
    }
    out
}

/// Change hunks turning `base` into `side`, in base order.
///
/// Hunks are the gaps between the equal runs of the diff; the positions of
/// non-equal ops reported by the diff library are not relied upon.
pub fn hunks(base: &[String], side: &[String]) -> Vec<Hunk> {
    let mut out = Vec::new();
    let (mut old, mut new) = (0, 0);
    let equal_runs = capture_diff_slices(Algorithm::Myers, base, side).into_iter().filter_map(|op| match op {
        DiffOp::Equal { old_index, new_index, len } => Some((old_index, new_index, len)),
        _ => None,
    });
    for (old_index, new_index, len) in equal_runs.chain(std::iter::once((base.len(), side.len(), 0))) {
        if old_index > old || new_index > new {
            out.push(Hunk { base_start: old, base_end: old_index, lines: side[new..new_index].to_vec() });
        }
        old = old_index + len;
        new = new_index + len;
    }
    out
}

/// Overlapping edits of the two sides.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConflictHunk {
    /// 0-based first base line touched by either side.
    pub base_start: usize,
    pub base_end: usize,
    pub left: Vec<String>,
    pub right: Vec<String>,
}

impl ConflictHunk {
    /// 1-based base line where the conflict starts.
    pub fn first_line(&self) -> usize {
        self.base_start + 1
    }
}

fn clash(a: &Hunk, b: &Hunk) -> bool {
    match (a.is_insertion(), b.is_insertion()) {
        (true, true) => a.base_start == b.base_start,
        (true, false) => b.base_start < a.base_start && a.base_start < b.base_end,
        (false, true) => a.base_start < b.base_start && b.base_start < a.base_end,
        (false, false) => a.base_start < b.base_end && b.base_start < a.base_end,
    }
}

/// Orders two non-clashing hunks; insertions go before a change starting at the same line.
fn goes_first(a: &Hunk, b: &Hunk) -> bool {
    (a.base_start, !a.is_insertion()) <= (b.base_start, !b.is_insertion())
}

/// Three-way merge at hunk granularity: each side's non-overlapping hunks are
/// applied, identical hunks are taken once, and overlapping different hunks
/// are reported as conflicts.
pub fn merge_body_diff3(base: &[String], left: &[String], right: &[String]) -> Result<Vec<String>, Vec<ConflictHunk>> {
    let lh = hunks(base, left);
    let rh = hunks(base, right);
    let (mut i, mut j) = (0, 0);
    let mut cursor = 0;
    let mut out = Vec::new();
    let mut conflicts = Vec::new();

    let emit = |h: &Hunk, cursor: &mut usize, out: &mut Vec<String>| {
        out.extend_from_slice(&base[*cursor..h.base_start]);
        out.extend(h.lines.iter().cloned());
        *cursor = h.base_end;
    };

    while i < lh.len() || j < rh.len() {
        match (lh.get(i), rh.get(j)) {
            (Some(l), Some(r)) if l == r => {
                emit(l, &mut cursor, &mut out);
                i += 1;
                j += 1;
            }
            (Some(l), Some(r)) if clash(l, r) => {
                // Grow the conflict over every hunk chained to it by overlap.
                let mut region = Hunk {
                    base_start: l.base_start.min(r.base_start),
                    base_end: l.base_end.max(r.base_end),
                    lines: Vec::new(),
                };
                let (i0, j0) = (i, j);
                i += 1;
                j += 1;
                loop {
                    if let Some(h) = lh.get(i).filter(|h| clash(&region, h)) {
                        region.base_end = region.base_end.max(h.base_end);
                        i += 1;
                    } else if let Some(h) = rh.get(j).filter(|h| clash(&region, h)) {
                        region.base_end = region.base_end.max(h.base_end);
                        j += 1;
                    } else {
                        break;
                    }
                }
                let (start, end) = (region.base_start, region.base_end);
                let side_text = |hs: &[Hunk]| -> Vec<String> {
                    let mut text = Vec::new();
                    let mut c = start;
                    for h in hs {
                        text.extend_from_slice(&base[c..h.base_start]);
                        text.extend(h.lines.iter().cloned());
                        c = h.base_end;
                    }
                    text.extend_from_slice(&base[c..end]);
                    text
                };
                conflicts.push(ConflictHunk {
                    base_start: start,
                    base_end: end,
                    left: side_text(&lh[i0..i]),
                    right: side_text(&rh[j0..j]),
                });
                cursor = end;
            }
            (Some(l), Some(r)) => {
                if goes_first(l, r) {
                    emit(l, &mut cursor, &mut out);
                    i += 1;
                } else {
                    emit(r, &mut cursor, &mut out);
                    j += 1;
                }
            }
            (Some(l), None) => {
                emit(l, &mut cursor, &mut out);
                i += 1;
            }
            (None, Some(r)) => {
                emit(r, &mut cursor, &mut out);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    if !conflicts.is_empty() {
        return Err(conflicts);
    }
    out.extend_from_slice(&base[cursor..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(items: &[&str]) -> Vec<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn disjoint_adjacent_changes_merge() {
        let merged = merge_body_diff3(&v(&["a", "b", "c"]), &v(&["a", "B", "c"]), &v(&["a", "b", "C"])).unwrap();
        assert_eq!(merged, v(&["a", "B", "C"]));
    }

    #[test]
    fn overlapping_changes_conflict() {
        let err = merge_body_diff3(&v(&["a", "b"]), &v(&["a", "X"]), &v(&["a", "Y"])).unwrap_err();
        assert_eq!(err.len(), 1);
        assert_eq!(err[0].first_line(), 2);
        assert_eq!(err[0].left, v(&["X"]));
        assert_eq!(err[0].right, v(&["Y"]));
    }

    #[test]
    fn identical_changes_merge_once() {
        let merged = merge_body_diff3(&v(&["a"]), &v(&["a", "z"]), &v(&["a", "z"])).unwrap();
        assert_eq!(merged, v(&["a", "z"]));
    }

    #[test]
    fn insertions_at_same_point_conflict() {
        assert!(merge_body_diff3(&v(&["a", "b"]), &v(&["a", "x", "b"]), &v(&["a", "y", "b"])).is_err());
    }

    #[test]
    fn insertion_inside_changed_range_conflicts() {
        let base = v(&["a", "b", "c", "d"]);
        assert!(merge_body_diff3(&base, &v(&["a", "b", "x", "c", "d"]), &v(&["a", "d"])).is_err());
    }

    #[test]
    fn insertion_before_change_is_ordered_first() {
        let base = v(&["a", "b", "c"]);
        let merged = merge_body_diff3(&base, &v(&["a", "new", "b", "c"]), &v(&["a", "B", "c"])).unwrap();
        assert_eq!(merged, v(&["a", "new", "B", "c"]));
    }

    #[test]
    fn one_sided_changes() {
        let base = v(&["a", "b", "c"]);
        let left = v(&["a", "c"]);
        assert_eq!(merge_body_diff3(&base, &left, &base).unwrap(), left);
        assert_eq!(merge_body_diff3(&base, &base, &left).unwrap(), left);
    }

    #[test]
    fn hunk_grouping() {
        let h = hunks(&v(&["a", "b", "c"]), &v(&["a", "x", "y", "c", "d"]));
        assert_eq!(
            h,
            vec![
                Hunk { base_start: 1, base_end: 2, lines: v(&["x", "y"]) },
                Hunk { base_start: 3, base_end: 3, lines: v(&["d"]) },
            ]
        );
    }

    fn lines_strategy() -> impl Strategy<Value = Vec<String>> {
        prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 0..8)
            .prop_map(|xs| xs.into_iter().map(String::from).collect())
    }

    proptest! {
        #[test]
        fn merge_is_symmetric(base in lines_strategy(), left in lines_strategy(), right in lines_strategy()) {
            let lr = merge_body_diff3(&base, &left, &right);
            let rl = merge_body_diff3(&base, &right, &left);
            prop_assert_eq!(lr.is_ok(), rl.is_ok());
            if let (Ok(a), Ok(b)) = (lr, rl) {
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn unchanged_side_yields_other(base in lines_strategy(), side in lines_strategy()) {
            prop_assert_eq!(merge_body_diff3(&base, &side, &base).unwrap(), side.clone());
            prop_assert_eq!(merge_body_diff3(&base, &base, &side).unwrap(), side);
        }
    }
}
