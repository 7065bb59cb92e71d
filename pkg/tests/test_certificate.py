from __future__ import annotations

import random
from fractions import Fraction

import pytest

from flagcert.certificate import (
    UNIT,
    Block,
    Certificate,
    basis_hash,
    default_slack_multipliers,
    emit_certificate,
    expand_certificate,
    export_sdp,
    parse_certificate,
    perturb,
    perturbable_entries,
    round_solution,
    shape_colorings,
    side_condition_graphs,
    side_condition_graphs_by_density,
    slack_expansion,
    synthetic_certificate,
    target_expression,
    target_expression_by_level3,
    verify,
)
from flagcert.enumeration import enumerate_colored_graphs
from flagcert.errors import CertificateSyntaxError, ContractViolation, RoundingError
from flagcert.field import QSqrt2
from flagcert.flags import GraphCombo, density, extend_level
from flagcert.graphs import ColoredGraph
from flagcert.linalg import SymMatrix

RED_K6 = ColoredGraph.complete(6)
RED_K33 = ColoredGraph.from_edges(6, red=[(i, j) for i in range(3) for j in range(3, 6)])


@pytest.fixture(scope="module", params=["C5", "C7"])
def problem(request):
    return request.param


@pytest.fixture(scope="module")
def synthetic(problem):
    return synthetic_certificate(problem, seed=3)


def zero_blocks(problem):
    from flagcert.certificate import _bases

    return [Block(name, SymMatrix.zeros(len(b))) for name, b in _bases(problem).items()]


def partition_of_unity(problem):
    """Level-6 form of red + blue + nonedge, which is 1: every graph gets coefficient 1."""
    fam = Certificate(problem, []).family
    pairs = GraphCombo(2, {ColoredGraph(2, (c,)).canonical_key(): 1 for c in (0, 1, 2)})
    return extend_level(pairs, 6, fam), fam


# -- targets ---------------------------------------------------------------------------

def test_c7_target_on_red_clique():
    assert target_expression("C7").evaluate(RED_K6) == 5


def test_c5_target_on_red_clique():
    assert target_expression("C5").evaluate(RED_K6) == QSqrt2(6, -1)


def test_targets_vanish_without_triangles(problem):
    assert target_expression(problem).evaluate(RED_K33) == 0


def test_two_expansion_routes_agree(problem):
    assert target_expression(problem) == target_expression_by_level3(problem)


def test_target_lives_on_family_graphs(problem):
    fam = Certificate(problem, []).family
    free = {g.canonical_key() for g in enumerate_colored_graphs(6, fam)}
    assert set(target_expression(problem).terms) <= free


# -- side conditions -------------------------------------------------------------------------

def test_side_sets_agree(problem):
    assert side_condition_graphs(problem) == side_condition_graphs_by_density(problem)


@pytest.mark.parametrize("problem, size", [("C5", 242), ("C7", 558)])
def test_side_set_sizes(problem, size):
    # frozen after the two independent computations above agreed
    assert len(side_condition_graphs(problem)) == size


def test_p4_has_six_colorings():
    assert len(shape_colorings("P4")) == 6


def test_p5_has_ten_colorings():
    assert len(shape_colorings("P5")) == 10


# -- verification -------------------------------------------------------------------------------

def test_synthetic_certificate_verifies(synthetic):
    report = verify(synthetic)
    assert report.identity_ok and report.psd_ok and report.side_conditions_ok
    assert not report.target_is_problem


def test_dense_synthetic_certificate_verifies(problem):
    assert verify(synthetic_certificate(problem, seed=5, factored=False, irrational=False)).ok


def test_verify_ignores_block_order(synthetic):
    flipped = Certificate(synthetic.problem, synthetic.blocks[::-1], synthetic.slack_terms, synthetic.c, synthetic.target)
    assert verify(flipped).to_dict() == verify(synthetic).to_dict()


def test_partition_of_unity_toy_certificate(problem):
    target, fam = partition_of_unity(problem)
    c = {g.canonical_key(): QSqrt2(1) for g in enumerate_colored_graphs(6, fam)}
    report = verify(Certificate(problem, zero_blocks(problem), [], c, target))
    assert report.identity_ok and report.psd_ok and report.side_conditions_ok


def test_perturbations_break_identity(synthetic):
    entries = list(perturbable_entries(synthetic))
    rng = random.Random(11)
    for where in rng.sample(entries, 12):
        report = verify(perturb(synthetic, where))
        assert not report.identity_ok
        assert report.diff
        assert any(reason.startswith("residual") for _, reason in report.violations)


def test_unperturbable_entries_leave_identity_alone(synthetic):
    # flags that never meet in one six-vertex graph of the family do not enter the identity
    listed = {pos for kind, pos in perturbable_entries(synthetic) if kind == "block"}
    block = synthetic.blocks[0]
    missing = [
        (i, j) for i in range(block.matrix.dim) for j in range(i, block.matrix.dim)
        if (block.name, (i, j)) not in listed
    ]
    if not missing:
        pytest.skip("every entry of this block is perturbable")
    assert verify(perturb(synthetic, ("block", (block.name, missing[0])))).identity_ok


def test_residual_self_consistency(synthetic):
    where = next(iter(perturbable_entries(synthetic)))
    diff = verify(perturb(synthetic, where)).diff
    for key, v in diff.items():
        h = ColoredGraph(key[0], key[1:])
        assert diff.evaluate(h) == v


def test_negative_slack_is_reported(synthetic):
    t = synthetic.slack_terms[0]
    bad = Certificate(synthetic.problem, synthetic.blocks,
                      [type(t)(QSqrt2(-1), t.g1, t.g2)] + synthetic.slack_terms[1:], synthetic.c, synthetic.target)
    report = verify(bad)
    assert not report.identity_ok
    assert any(reason == "negative slack coefficient" for _, reason in report.violations)


def test_non_psd_block_is_reported(synthetic):
    blocks = list(synthetic.blocks)
    m = blocks[0].matrix
    rows = [list(r) for r in m.rows]
    rows[0][0] = rows[0][0] - 1000
    blocks[0] = Block(blocks[0].name, SymMatrix(rows, check=False))
    assert not verify(Certificate(synthetic.problem, blocks, synthetic.slack_terms, synthetic.c, synthetic.target)).psd_ok


def test_missing_side_condition_is_reported(synthetic):
    key = min(side_condition_graphs(synthetic.problem))
    c = dict(synthetic.c)
    del c[key]
    report = verify(Certificate(synthetic.problem, synthetic.blocks, synthetic.slack_terms, c, synthetic.target))
    assert not report.side_conditions_ok
    assert not report.identity_ok


# -- text format ----------------------------------------------------------------------------------

def test_round_trip(synthetic):
    text = emit_certificate(synthetic)
    again = parse_certificate(text)
    assert emit_certificate(again) == text
    assert again.c == synthetic.c and again.target == synthetic.target
    assert [b.matrix.rows for b in again.blocks] == [b.matrix.rows for b in synthetic.blocks]


def test_dense_round_trip():
    cert = synthetic_certificate("C7", seed=2, factored=False)
    assert emit_certificate(parse_certificate(emit_certificate(cert))) == emit_certificate(cert)


def _minimal(problem="C7", extra=""):
    return f"problem {problem}\nbasis-hash {basis_hash(problem)}\n{extra}"


def test_minimal_file_with_target_coefficients():
    target = target_expression("C7")
    body = "".join(
        f"c {ColoredGraph(k[0], k[1:]).encode()} {v}\n" for k, v in target.items() if v.sign() > 0
    )
    cert = parse_certificate(_minimal(extra=body))
    report = verify(cert)
    # the target has negative coefficients, which no c_H can absorb
    assert not report.identity_ok


@pytest.mark.parametrize("text, line", [
    ("problem C9\n", 1),
    ("problem C5\nbasis-hash abc\n", 2),
    ("problem C5\n", None),
])
def test_header_errors(text, line):
    with pytest.raises(CertificateSyntaxError) as err:
        parse_certificate(text)
    assert err.value.line == line


def test_negative_c_names_graph():
    g = enumerate_colored_graphs(6, "FC7")[0].encode()
    with pytest.raises(CertificateSyntaxError, match=g) as err:
        parse_certificate(_minimal(extra=f"# comment\nc {g} -1/3\n"))
    assert err.value.line == 4


@pytest.mark.parametrize("extra, line, match", [
    ("bogus 1\n", 3, "unknown keyword"),
    ("block rho 5\n", 3, "dimension"),
    ("block beta 33\ndense\n1 2 3\n", 5, "expected 561 numbers"),
    ("c 5:0000000000 1\n", 3, "6 vertices"),
    ("c 6:00000000000000x 1\n", 3, "bad graph"),
    ("slack -1 4:000000\n", 3, "negative slack"),
    ("target 6:000000000000000 1+\n", 3, None),
])
def test_body_errors(extra, line, match):
    with pytest.raises(CertificateSyntaxError, match=match) as err:
        parse_certificate(_minimal(extra=extra))
    assert err.value.line == line


# -- SDP export -------------------------------------------------------------------------------------

def _sdpa_rows(text):
    lines = [l for l in text.splitlines() if not l.startswith('"')]
    m = int(lines[0])
    nblock = int(lines[1])
    sizes = lines[2].split()
    c = [float(x) for x in lines[3].split()]
    rows = [[] for _ in range(m)]
    for l in lines[4:]:
        k, blk, i, j, v = l.split()
        rows[int(k) - 1].append((int(blk), int(i), int(j), float(v)))
    return m, nblock, sizes, c, rows


@pytest.mark.parametrize("problem, count", [("C5", 756), ("C7", 741)])
def test_export_counts(problem, count):
    m, nblock, sizes, c, _ = _sdpa_rows(export_sdp(problem))
    assert m == count and nblock == 4
    assert sizes[:3] == ["76", "33", "43"]
    assert len(c) == count


def test_export_block_line_c5():
    text = export_sdp("C5")
    assert "\n76 33 43 -785\n" in text


def test_export_matches_exact_expansion(synthetic):
    problem = synthetic.problem
    text = export_sdp(problem)
    _, _, _, c, rows = _sdpa_rows(text)
    graphs = enumerate_colored_graphs(6, synthetic.family)
    mult = default_slack_multipliers(problem)
    slack = [0.0] * len(mult)
    slack[0], slack[3] = 0.5, 2.0
    cert = Certificate(problem, synthetic.blocks, [], {}, None)
    exact = expand_certificate(cert)
    for s, (g1, g2) in zip(slack, mult):
        if s:
            exact = exact + slack_expansion(g1, g2, problem).scale(Fraction(s))
    mats = {k: [[float(x) for x in r] for r in b.matrix.rows] for k, b in enumerate(synthetic.blocks, 1)}
    target = target_expression(problem)
    for g, row, ck in zip(graphs, rows, c):
        assert ck == pytest.approx(float(target.coefficient(g)), abs=1e-12)
        total = 0.0
        for blk, i, j, v in row:
            if blk == 4:
                if i <= len(mult):
                    total += v * slack[i - 1]
            else:
                total += v * mats[blk][i - 1][j - 1] * (1 if i == j else 2)
        assert total == pytest.approx(float(exact.coefficient(g)), abs=1e-9)


# -- rounding -----------------------------------------------------------------------------------------

def _as_pairs(m):
    return [[(float(x.p), float(x.q)) for x in r] for r in m.rows]


def test_rounding_recovers_synthetic(synthetic):
    blocks = {b.name: _as_pairs(b.matrix) for b in synthetic.blocks}
    mult = [(t.g1, t.g2) for t in synthetic.slack_terms]
    slack = [float(t.coeff) for t in synthetic.slack_terms]
    cert = round_solution(synthetic.problem, blocks, slack, 10**6, mult, target=synthetic.target)
    assert verify(cert).ok
    assert cert.c == synthetic.c


def test_zero_solution_gives_target_as_c(problem):
    cert = round_solution(problem, {}, strict=False)
    assert GraphCombo(6, cert.c) == target_expression(problem)
    # both targets have negative coefficients
    assert not verify(cert).identity_ok


def test_zero_solution_is_rejected_when_strict(problem):
    with pytest.raises(RoundingError, match="denominator"):
        round_solution(problem, {})


def test_zero_solution_on_nonnegative_target(problem):
    target, _ = partition_of_unity(problem)
    cert = round_solution(problem, {}, target=target)
    assert verify(cert).identity_ok


def test_denominators_respect_bound():
    rng = random.Random(4)
    from flagcert.certificate import _bases

    bases = _bases("C7")
    blocks = {}
    for name, b in bases.items():
        d = len(b)
        raw = [[0.0] * d for _ in range(d)]
        for i in range(d):
            for j in range(i, d):
                raw[i][j] = raw[j][i] = rng.uniform(-1, 1) * 1e-3
        blocks[name] = raw
    cert = round_solution("C7", blocks, denominator_bound=997, strict=False)
    for b in cert.blocks:
        for r in b.matrix.rows:
            for x in r:
                assert x.p.denominator <= 997 and x.q.denominator <= 997


def test_rounding_dimension_check():
    with pytest.raises(ContractViolation):
        round_solution("C5", {"rho": [[0.0]]})


@pytest.mark.skipif(__import__("shutil").which("csdp") is None, reason="external SDP solver not installed")
def test_solver_pipeline_end_to_end(tmp_path):
    import subprocess

    from flagcert.cli import _read_solution
    from flagcert.errors import RoundingError

    sdp = tmp_path / "c7.dat-s"
    sdp.write_text(export_sdp("C7"))
    sol = tmp_path / "c7.sol"
    subprocess.run(["csdp", str(sdp), str(sol)], capture_output=True, timeout=3600)
    blocks, slack = _read_solution(sol, "C7")
    try:
        cert = round_solution("C7", blocks, slack)
    except RoundingError:
        pytest.skip("solver output did not round at the default denominator bound")
    assert isinstance(verify(cert).ok, bool)
