import json
from pathlib import Path

import numpy as np
import pytest

from rank2sep.errors import ParseError, ValidationError
from rank2sep.formats import (
    Report,
    parse_state_file,
    serialize_state_file,
    state_file_from,
)
from rank2sep.oracles import random_product_mixture, random_rank2
from rank2sep.separability import check, check_rank2
from rank2sep.states import maximally_entangled

DATA = Path(__file__).parent / "data"


def read(name):
    return (DATA / name).read_text()


def test_parse_golden_files():
    sf = parse_state_file(read("bell_mixture_p25.state"))
    assert sf.kind == "eigen_pair" and sf.p == 0.25
    assert sf.rank2_state().N == 2
    sf = parse_state_file(read("classical_mix.state"))
    np.testing.assert_array_equal(sf.rho, np.diag([0.5, 0, 0, 0.5]))
    sf = parse_state_file(read("bell.state"))
    np.testing.assert_allclose(sf.pure_state().A, maximally_entangled(2).A, atol=1e-16)


def test_trace_deficit_is_reported():
    with pytest.raises(ValidationError) as info:
        parse_state_file(read("short_trace.state"))
    assert info.value.invariant == "trace"
    assert info.value.amount == pytest.approx(0.1, abs=1e-12)
    assert "trace deficit 0.1" in str(info.value)


def test_overlap_is_reported():
    c, s = np.sqrt(0.96), 0.2
    doc = {
        "kind": "eigen_pair",
        "N": 2,
        "p": 0.5,
        "E1": [[1, 0], [0, 0]],
        "E2": [[s, c], [0, 0]],
    }
    with pytest.raises(ValidationError) as info:
        parse_state_file(json.dumps(doc))
    assert info.value.invariant == "orthogonality"
    assert info.value.amount == pytest.approx(0.2, abs=1e-12)
    assert "|<E1|E2>| = 0.2" in str(info.value)


@pytest.mark.parametrize(
    "text, invariant",
    [
        ('{"kind": "nope", "N": 2}', "schema"),
        ('{"kind": "pure_state", "N": 2}', "schema"),
        ('{"kind": "pure_state", "N": 2, "A": [[1, 0], [0]]}', "schema"),
        ('{"kind": "pure_state", "N": 2, "A": [[1, 0], [0, 1]]}', "normalization"),
        ('{"kind": "pure_state", "N": 3, "A": [[1, 0], [0, 0]]}', "shape"),
        ('{"kind": "density_matrix", "N": 2, "rho": [[0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 1]]}',
         "hermiticity"),
        ('{"kind": "density_matrix", "N": 2, "rho": [[1.5, 0, 0, 0], [0, -0.5, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]]}',
         "positivity"),
        ('{"kind": "eigen_pair", "N": 2, "p": 1.5, "E1": [[1, 0], [0, 0]], "E2": [[0, 1], [0, 0]]}', "weight"),
        ('{"kind": "pure_state", "N": 2, "schema_version": "2.0", "A": [[1, 0], [0, 0]]}', "schema"),
    ],
)
def test_validation_errors(text, invariant):
    with pytest.raises(ValidationError) as info:
        parse_state_file(text)
    assert info.value.invariant == invariant


def test_parse_error_location():
    with pytest.raises(ParseError) as info:
        parse_state_file('{\n "kind": "pure_state",\n "N": 2,,\n}')
    assert info.value.line == 3
    assert "line 3" in str(info.value)


@pytest.mark.parametrize(
    "obj",
    [
        random_product_mixture(3, 0.3, seed=1)[0],
        random_rank2(3, 0.3, seed=2),
        maximally_entangled(4),
    ],
    ids=["density", "eigen_pair", "pure"],
)
def test_round_trip_is_exact(obj):
    sf = state_file_from(obj, {"seed": 1})
    back = parse_state_file(serialize_state_file(sf))
    assert back.kind == sf.kind and back.provenance == {"seed": 1}
    assert np.max(np.abs(back.density() - sf.density())) <= 1e-15


def test_report_json_round_trip():
    rho, _ = random_product_mixture(2, 0.3, seed=3)
    report = Report.from_verdict(check(rho, 2), oracle={"ppt_holds": True}, input_sha256="ab")
    again = Report.from_json(report.to_json())
    assert again == report
    assert again.separable and len(again.decomposition) == 2
    for term in again.decomposition:
        assert term["concurrence"] < 1e-9
    # C(E1), C(E2) record the product tests; the eigenvectors here are entangled
    decisive = {k: r for k, r in again.residuals.items() if not k.startswith("C(")}
    assert decisive and all(r["value"] <= r["threshold"] for r in decisive.values())


def test_report_from_dict_rejects_unknown_schema():
    with pytest.raises(ValidationError):
        Report.from_dict({"schema_version": "other"})


def test_report_text_mentions_verdict_and_branch():
    v = check_rank2(parse_state_file(read("bell_mixture_p25.state")).rank2_state())
    report = Report.from_verdict(v)
    assert report.headline == "ENTANGLED (corollary fast path: p=0.25 < 1/2)"
    text = report.to_text()
    assert "EntangledCorollary" in text
    assert "no product decomposition exists" in report.to_decomposition_text()
