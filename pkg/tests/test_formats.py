import pytest

from dfgfold.formats import (
    bundled_path,
    format_dfg,
    format_folding_spec,
    parse_dfg,
    parse_folding_spec,
    parse_unit_assignment,
)
from dfgfold.transforms import DuplicateNode, FoldingSpec

IDENTITY = "node IN input\nnode OUT output\nedge e: IN -> OUT.p0\n"


def test_identity_file():
    g = parse_dfg(IDENTITY)
    assert [e.id for e in g.edges] == ["e"] and g.edge("e").w == 0


def test_comments_and_port_shorthand():
    g = parse_dfg("# header\nnode IN input  # src\nnode G gain:-2\nnode OUT output\nedge x: IN.out -> G delays=3\nedge y: G -> OUT\n")
    assert g.edge("x").dst_port == "p0" and g.edge("x").w == 3
    assert g.node("G").kind.shift == -2


def test_undeclared_node_names_it():
    with pytest.raises(SyntaxError) as info:
        parse_dfg("node A1 add\nedge x: A9 -> A1.p0\n")
    assert "A9" in str(info.value)
    assert info.value.lineno == 2


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("node IN input\nnode\n", 2),
        ("node X mul\n", 1),
        ("vertex X add\n", 1),
        ("node A add\nnode A add\n", 2),
        ("node A add\nedge q: A -> A\n", 2),  # two in-ports, none named
    ],
)
def test_syntax_errors_carry_line(text, lineno):
    with pytest.raises(SyntaxError) as info:
        parse_dfg(text)
    assert info.value.lineno == lineno


def test_validation_runs_after_parse():
    from dfgfold.dfg import DanglingPort

    with pytest.raises(DanglingPort):
        parse_dfg("node IN input\nnode A add\nnode OUT output\nedge x: IN -> A.p0\nedge y: A -> OUT\n")


def test_bundled_files_round_trip():
    for name in ("paper_lpf.dfg",):
        g = parse_dfg(bundled_path(name).read_text())
        assert parse_dfg(format_dfg(g)) == g
    spec = parse_folding_spec(bundled_path("paper.fold").read_text())
    assert parse_folding_spec(format_folding_spec(spec)) == spec
    assert parse_unit_assignment(bundled_path("paper.units").read_text()) == {
        "A1": "S1", "A0": "S1", "A2": "S2", "A3": "S2",
    }


def test_bundled_spec_text():
    spec = parse_folding_spec("factor 2\nunit S1 order A1,A0\nunit S2 order A2,A3\n")
    assert spec == FoldingSpec(2, {"S1": ("A1", "A0"), "S2": ("A2", "A3")})
    assert spec.stages("add") == 1


def test_trivial_spec_and_idle_slots():
    assert parse_folding_spec("factor 1\nunit U order A\n") == FoldingSpec(1, {"U": ("A",)})
    spec = parse_folding_spec("factor 3\nunit U order _,A,B\nstages gain 2\n")
    assert spec.units["U"] == (None, "A", "B")
    assert spec.stages("gain") == 2


def test_spec_errors():
    with pytest.raises(DuplicateNode):
        parse_folding_spec("factor 2\nunit S1 order A1,A0\nunit S2 order A0,A3\n")
    with pytest.raises(SyntaxError):
        parse_folding_spec("unit S1 order A1\n")
    with pytest.raises(SyntaxError):
        parse_folding_spec("factor two\n")
    with pytest.raises(SyntaxError):
        parse_folding_spec("factor 2\nunit S1 order A\nunit S1 order B\n")
