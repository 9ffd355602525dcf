"""Smoke test for the mergeifc_py extension module.

Build the module and put it on the path first, e.g.

    cargo build -p mergeifc-python --release --features extension-module
    cp target/release/libmergeifc_py.so python/mergeifc_py.so
    python3 python/smoke_test.py
"""

import json
import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

import mergeifc_py as m  # noqa: E402

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"


def read(name):
    d = CORPUS / name
    return [(d / f"{side}.mj").read_text() for side in ("base", "left", "right")]


def test_parse():
    methods = m.parse("class A {\n  int f;\n  void set(int x) {\n    f = x;\n  }\n}\n")
    assert methods == ["A.set"], methods
    try:
        m.parse("class A {")
    except m.FrontendError as e:
        assert "parse error" in str(e)
    else:
        raise AssertionError("expected FrontendError")


def test_config():
    c = m.Config(exceptions=True, call_graph="type", node_limit=50)
    assert (c.id, c.exceptions, c.call_graph, c.node_limit) == ("type_exc", True, "type", 50)
    assert m.Config.from_id("instance_noexc").id == "instance_noexc"
    try:
        m.Config(call_graph="fancy")
    except ValueError:
        pass
    else:
        raise AssertionError("expected ValueError")


def test_merge():
    result = m.merge(*read("generate_bill"))
    assert result.conflict_count == 0
    [(method, left, right)] = result.method_edits
    assert method == "Bill.generateBill"
    assert left and right
    assert len(result.attribution) == len(result.merged_text.splitlines())
    assert json.loads(result.to_json())["method_edits"][0]["method"] == method
    assert m.merge(*read("conflict")).conflict_count > 0


def test_analyze():
    bill = m.analyze(*read("generate_bill"), scenario_id="generate_bill")
    assert bill.sdg_created and bill.failure_reason == "NONE"
    assert bill.direct_flow_count and bill.direct_flow_count > 0
    assert any(f[0] == "LEFT_TO_RIGHT" for f in bill.findings)
    assert bill.csv().splitlines()[0] == ",".join(m.CSV_COLUMNS)
    assert bill.dot().startswith("digraph")
    detail = json.loads(bill.to_json())
    assert detail["report"]["scenario_id"] == "generate_bill"

    html = m.analyze_dir(str(CORPUS / "outer_html"))
    assert html.direct_flow_count == 0 and html.indirect_count > 0
    assert any(f[0] == "INDIRECT_COMMON_TARGET" and f[3] is not None for f in html.findings)

    heavy = m.analyze(*read("generate_bill"), config=m.Config(node_limit=10))
    assert (heavy.sdg_created, heavy.failure_reason, heavy.nodes) == (False, "TOO_HEAVY_NODES", None)

    vd_type = m.analyze_dir(str(CORPUS / "virtual_dispatch"), m.Config(call_graph="type"))
    vd_inst = m.analyze_dir(str(CORPUS / "virtual_dispatch"), m.Config(call_graph="instance"))
    assert vd_type.direct_flow_count > 0 and vd_inst.findings == []


def test_corpus_and_compare():
    one = m.run_corpus(str(CORPUS), matrix="full", jobs=1)
    many = m.run_corpus(str(CORPUS), matrix="full", jobs=4)
    assert one.csv() == many.csv()
    summary = json.loads(one.summary_json())
    assert len(summary["configs"]) == 4
    assert one.row_count == 4 * summary["scenarios"]
    comparison = json.loads(m.compare(one.csv()))
    assert all(p["violations"] == 0 for p in comparison["pairs"] if p["axis"])
    try:
        m.compare("bad,header\n")
    except m.SchemaError as e:
        assert "SCHEMA_ERROR" in str(e)
    else:
        raise AssertionError("expected SchemaError")


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} smoke tests passed")
