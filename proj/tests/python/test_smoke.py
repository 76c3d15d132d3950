"""End-to-end smoke test of the Python module: build a small program graph,
verify it, optimize it to a constant return, lower it to target instructions,
and round-trip it through GXL. Runnable directly or under pytest."""

import sys

import irkit


def build_diamond():
    """min(0, 1) + 1 as a Cmp/Cond diamond over two constants."""
    g = irkit.Graph()
    g.name = "diamond"
    sb = g.add_node("StartBlock")
    eb = g.add_node("EndBlock")
    start = g.add_node("Start")
    g.add_edge(start, sb, "Dataflow", -1)
    end = g.add_node("End")
    g.add_edge(end, eb, "Dataflow", -1)

    c0 = g.add_node("Const", value=0)
    g.add_edge(c0, sb, "Dataflow", -1)
    c1 = g.add_node("Const", value=1)
    g.add_edge(c1, sb, "Dataflow", -1)

    cmp_ = g.add_node("Cmp", relation="LESS")
    g.add_edge(cmp_, sb, "Dataflow", -1)
    g.add_edge(cmp_, c0, "Dataflow", 0)
    g.add_edge(cmp_, c1, "Dataflow", 1)
    cond = g.add_node("Cond")
    g.add_edge(cond, sb, "Dataflow", -1)
    g.add_edge(cond, cmp_, "Dataflow", 0)

    bt = g.add_node("Block")
    jt = g.add_node("Jmp")
    g.add_edge(jt, bt, "Dataflow", -1)
    g.add_edge(bt, cond, "True", 0)
    bf = g.add_node("Block")
    jf = g.add_node("Jmp")
    g.add_edge(jf, bf, "Dataflow", -1)
    g.add_edge(bf, cond, "False", 0)

    join = g.add_node("Block")
    g.add_edge(join, jt, "Controlflow", 0)
    g.add_edge(join, jf, "Controlflow", 1)
    phi = g.add_node("Phi")
    g.add_edge(phi, join, "Dataflow", -1)
    g.add_edge(phi, c0, "Dataflow", 0)
    g.add_edge(phi, c1, "Dataflow", 1)
    add = g.add_node("Add", associative=True, commutative=True)
    g.add_edge(add, join, "Dataflow", -1)
    g.add_edge(add, phi, "Dataflow", 0)
    g.add_edge(add, c1, "Dataflow", 1)
    ret = g.add_node("Return")
    g.add_edge(ret, join, "Dataflow", -1)
    g.add_edge(ret, start, "Memory", 0)
    g.add_edge(ret, add, "Dataflow", 1)
    g.add_edge(eb, ret, "Controlflow", 0)
    return g


def test_verify_clean():
    g = build_diamond()
    assert g.node_count() == 16
    assert irkit.verify(g) == []


def test_verify_reports_problems():
    g = build_diamond()
    g.add_node("Start")  # a second entry, left without a block on purpose
    rules = {d["rule"] for d in irkit.verify(g)}
    assert "R1" in rules
    assert all(d["severity"] in ("error", "warning") for d in irkit.verify(g))


def test_optimize_collapses_to_constant():
    g = build_diamond()
    report = irkit.optimize(g)
    assert report["reached_fixpoint"] is True
    assert report["nodes_before"] == 16
    assert report["nodes_after"] < report["nodes_before"]
    assert report["applications"]["fold-cond"] == 1
    kinds = [g.node_kind(n) for n in g.node_ids()]
    assert "Cmp" not in kinds and "Cond" not in kinds and "Phi" not in kinds
    assert irkit.verify(g) == []


def test_rule_selection():
    g = build_diamond()
    report = irkit.optimize(g, rules=["fold-const"])
    assert set(report["applications"]) <= {"fold-const"}
    kinds = [g.node_kind(n) for n in g.node_ids()]
    assert "Cond" in kinds  # fold-cond was off


def test_select_lowers_everything():
    g = build_diamond()
    irkit.optimize(g)
    report = irkit.select(g, sequential=True)
    assert report["total_target_ops"] == sum(report["selected"].values())
    kinds = [g.node_kind(n) for n in g.node_ids()]
    assert "TargetJmp" in kinds
    assert "TargetConst" in kinds
    assert "Jmp" not in kinds
    assert irkit.verify(g) == []


def test_gxl_round_trip():
    g = build_diamond()
    text = irkit.write_gxl(g)
    assert irkit.write_gxl(g) == text
    h = irkit.parse_gxl(text)
    assert h.name == g.name
    assert h.node_count() == g.node_count()
    assert h.edge_count() == g.edge_count()
    assert irkit.write_gxl(h) == text


def test_dot_export():
    dot = irkit.write_dot(build_diamond())
    assert dot.startswith("digraph")
    assert "subgraph cluster_" in dot
    flat = irkit.write_dot(build_diamond(), cluster_blocks=False)
    assert "subgraph cluster_" not in flat


def test_errors_are_raised():
    try:
        irkit.parse_gxl("this is not xml")
    except irkit.IrError:
        pass
    else:
        raise AssertionError("parse_gxl accepted junk")

    try:
        irkit.Graph().add_node("NoSuchKind")
    except irkit.IrError:
        pass
    else:
        raise AssertionError("add_node accepted an unknown kind")

    g = build_diamond()
    g.add_node("Start")
    try:
        irkit.optimize(g)
    except irkit.IrError:
        pass
    else:
        raise AssertionError("optimize accepted a broken graph")


def main():
    tests = [(name, fn) for name, fn in sorted(globals().items())
             if name.startswith("test_") and callable(fn)]
    for name, fn in tests:
        fn()
        print(f"ok {name}")
    print(f"{len(tests)} python smoke tests passed")


if __name__ == "__main__":
    sys.exit(main())
