use super::*;
use proptest::prelude::*;

const BILL_BASE: &str = "class Bill {
  int generateBill(Item it, int count) {
    int total = 0;
    while (!(it == null)) {
      total = total + it.price;
      it = it.next; }
    return total; }
  int pricesMean;
}
class Item {
  int price;
  Item next;
}
";

const BILL_LEFT: &str = "class Bill {
  int generateBill(Item it, int count) {
    int total = 0;
    while (!(it == null)) {
      if (100 < it.price)
        total = total - it.price / 10;
      total = total + it.price;
      it = it.next; }
    return total; }
  int pricesMean;
}
class Item {
  int price;
  Item next;
}
";

const BILL_RIGHT: &str = "class Bill {
  int generateBill(Item it, int count) {
    int total = 0;
    while (!(it == null)) {
      total = total + it.price;
      it = it.next; }
    pricesMean = total / count;
    return total; }
  int pricesMean;
}
class Item {
  int price;
  Item next;
}
";

fn scenario(b: &str, l: &str, r: &str) -> MergeScenario {
    MergeScenario::from_sources(b, l, r).unwrap()
}

#[test]
fn bill_merges_with_expected_attribution() {
    let out = merge_members(&scenario(BILL_BASE, BILL_LEFT, BILL_RIGHT)).unwrap();
    assert!(out.conflicts.is_empty());
    let lines: Vec<&str> = out.merged_text.lines().collect();
    assert_eq!(lines[4].trim(), "if (100 < it.price)");
    assert_eq!(lines[8].trim(), "pricesMean = total / count;");
    assert_eq!(out.attribution.lines_of(Origin::Left), [5, 6].into());
    assert_eq!(out.attribution.lines_of(Origin::Right), [9].into());
    assert_eq!(
        out.method_edits,
        vec![MethodEdit { method: "Bill.generateBill".into(), left_lines: [5, 6].into(), right_lines: [9].into() }]
    );
    assert!(out.dropped.is_empty());
}

#[test]
fn swapping_sides_swaps_attribution() {
    let s = scenario(BILL_BASE, BILL_LEFT, BILL_RIGHT);
    let a = merge_members(&s).unwrap();
    let b = merge_members(&s.swapped()).unwrap();
    assert_eq!(a.merged_text, b.merged_text);
    assert_eq!(a.attribution.lines_of(Origin::Left), b.attribution.lines_of(Origin::Right));
    assert_eq!(a.attribution.lines_of(Origin::Right), b.attribution.lines_of(Origin::Left));
}

#[test]
fn different_methods_are_not_same_method_edits() {
    let base = "class A {\n  int x;\n  void f() {\n    x = 1;\n  }\n  void g() {\n    x = 2;\n  }\n}\n";
    let left = base.replace("x = 1;", "x = 10;");
    let right = base.replace("x = 2;", "x = 20;");
    let out = merge_members(&scenario(base, &left, &right)).unwrap();
    assert!(out.conflicts.is_empty());
    assert!(out.method_edits.is_empty());
    assert!(out.merged_text.contains("x = 10;") && out.merged_text.contains("x = 20;"));
}

#[test]
fn overlapping_method_edits_conflict() {
    let base = "class A {\n  int x;\n  void f() {\n    x = 1;\n  }\n}\n";
    let left = base.replace("x = 1;", "x = 2;");
    let right = base.replace("x = 1;", "x = 3;");
    let out = merge_members(&scenario(base, &left, &right)).unwrap();
    assert_eq!(out.conflicts.len(), 1);
    assert_eq!(out.conflicts[0].location, "A.f");
    assert!(out.merged.is_none());
    assert!(out.method_edits.is_empty());
}

#[test]
fn field_changed_differently_conflicts() {
    let base = "class A {\n  int x;\n}\n";
    let left = "class A {\n  bool x;\n}\n";
    let right = "class A {\n  A x;\n}\n";
    let out = merge_members(&scenario(base, left, right)).unwrap();
    assert_eq!(out.conflicts.len(), 1);
    assert_eq!(out.conflicts[0].location, "A.x");
}

#[test]
fn members_added_on_each_side_are_kept_left_first() {
    let base = "class A {\n  int x;\n}\n";
    let left = "class A {\n  int x;\n  int l;\n}\n";
    let right = "class A {\n  int x;\n  int r;\n}\n";
    let out = merge_members(&scenario(base, left, right)).unwrap();
    assert_eq!(out.merged_text, "class A {\n  int x;\n  int l;\n  int r;\n}\n");
}

#[test]
fn identical_additions_are_base() {
    let base = "class A {\n  int x;\n  int z;\n  int log;\n  void f() {\n    x = 0;\n    z = 1;\n    x = 2;\n  }\n}\n";
    let left = base.replace("    x = 0;\n", "    x = 0;\n    x = x + 1;\n").replace("    z = 1;\n", "    z = 1;\n    log = 1;\n");
    let right = base.replace("    z = 1;\n", "    z = 1;\n    log = 1;\n").replace("    x = 2;\n", "    x = 2;\n    z = z * 2;\n");
    let out = merge_members(&scenario(base, &left, &right)).unwrap();
    assert!(out.conflicts.is_empty(), "{:?}", out.conflicts);
    let merged: Vec<&str> = out.merged_text.lines().collect();
    let log_line = merged.iter().position(|l| l.trim() == "log = 1;").unwrap() as u32 + 1;
    assert_eq!(out.attribution.origin(log_line), Origin::Base);
    assert_eq!(out.method_edits.len(), 1);
    assert!(!out.method_edits[0].left_lines.contains(&log_line));
    assert!(!out.method_edits[0].right_lines.contains(&log_line));
}

#[test]
fn deletion_only_side_is_dropped() {
    let base = "class A {\n  int x;\n  void f() {\n    x = 1;\n    x = 2;\n    x = 3;\n  }\n}\n";
    let left = base.replace("    x = 1;\n", "");
    let right = base.replace("x = 3;", "x = 30;");
    let out = merge_members(&scenario(base, &left, &right)).unwrap();
    assert!(out.conflicts.is_empty());
    assert!(out.method_edits.is_empty());
    assert_eq!(out.dropped, vec![DroppedMethod { method: "A.f".into(), reason: DropReason::NoSourceOrSinkLines }]);
    assert_eq!(out.deletion_only, vec!["A.f".to_string()]);
}

#[test]
fn class_deleted_and_changed_conflicts() {
    let base = "class A {\n  int x;\n}\nclass B {\n  int y;\n}\n";
    let left = "class A {\n  int x;\n}\n";
    let right = "class A {\n  int x;\n}\nclass B {\n  int y;\n  int z;\n}\n";
    let out = merge_members(&scenario(base, left, right)).unwrap();
    assert_eq!(out.conflicts.len(), 1);
    assert_eq!(out.conflicts[0].location, "B");
}

#[test]
fn shared_member_line_is_a_layout_error() {
    let base = "class A { int x;\n}\n";
    let err = merge_members(&scenario(base, base, base)).unwrap_err();
    assert!(matches!(err, MergeError::Layout { .. }));
}

#[test]
fn bad_revision_names_its_side() {
    let err = MergeScenario::from_sources("class A {}", "class A {", "class A {}").unwrap_err();
    assert!(matches!(err, MergeError::Frontend { side: Side::Left, .. }));
}

fn body_edit() -> impl Strategy<Value = Vec<String>> {
    let stmt = prop::sample::select(vec!["a = a + 1;", "b = a;", "a = b * 2;", "b = 0;", "c = a + b;"]);
    prop::collection::vec(stmt, 1..6).prop_map(|v| v.into_iter().map(|s| format!("    {s}")).collect())
}

fn wrap(body: &[String]) -> String {
    format!("class A {{\n  int a;\n  int b;\n  int c;\n  void f() {{\n{}\n  }}\n}}\n", body.join("\n"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn attribution_is_symmetric(base in body_edit(), left in body_edit(), right in body_edit()) {
        let s = scenario(&wrap(&base), &wrap(&left), &wrap(&right));
        let a = merge_members(&s).unwrap();
        let b = merge_members(&s.swapped()).unwrap();
        prop_assert_eq!(a.conflicts.is_empty(), b.conflicts.is_empty());
        if a.conflicts.is_empty() {
            prop_assert_eq!(&a.merged_text, &b.merged_text);
            prop_assert_eq!(a.attribution.lines_of(Origin::Left), b.attribution.lines_of(Origin::Right));
            prop_assert_eq!(a.attribution.lines_of(Origin::Right), b.attribution.lines_of(Origin::Left));
            prop_assert_eq!(a.method_edits.len(), b.method_edits.len());
        }
    }
}
