import json

import jsonschema
import pytest
from hypothesis import given
from hypothesis import strategies as st

from crnx.classify import InconsistentVerdict
from crnx.report import REPORT_SCHEMA, AnalysisReport, analyze_network, num


@pytest.fixture(scope="module")
def reports(acr, quartic, cubic, switching):
    return {name: analyze_network(net) for name, net in
            [("acr", acr), ("quartic", quartic), ("cubic", cubic), ("switching", switching)]}


def test_round_trip(reports):
    for rep in reports.values():
        assert AnalysisReport.from_json(rep.to_json()) == rep


def test_schema_valid(reports):
    for rep in reports.values():
        data = json.loads(rep.to_json())
        jsonschema.validate(data, REPORT_SCHEMA)
        assert data["schema"] == 1


def test_acr_report_content(reports):
    r = reports["acr"]
    assert r.structure["weakly_reversible"] and r.structure["deficiency"] == 0
    assert r.equilibrium["found"]
    assert r.verdicts == ["non-explosive-certified", "stationary-distribution-exists"]
    st_ = r.stationary[0]
    assert st_["balance"]["passes"] and st_["embedded_balance"]["passes"]
    assert st_["jump_rate"]["value"] == pytest.approx(4.0)


def test_quartic_report_content(reports):
    r = reports["quartic"]
    assert not r.structure["weakly_reversible"] and r.structure["deficiency"] == 3
    assert r.equilibrium["obstruction"] == ["5A"]
    assert "explosive" in r.verdicts
    assert r.stationary[0]["jump_rate"]["upper"] == "inf"


def test_unknown_verdict_rejected(reports):
    data = json.loads(reports["acr"].to_json())
    data["classification"]["verdicts"] = ["probably-fine"]
    with pytest.raises(jsonschema.ValidationError):
        AnalysisReport.from_json(json.dumps(data))


def test_contradiction_rejected(reports):
    data = json.loads(reports["acr"].to_json())
    data["classification"]["verdicts"] = ["non-explosive-certified", "explosive"]
    rep = AnalysisReport(**{k: v for k, v in data.items()})
    with pytest.raises(InconsistentVerdict):
        rep.validate()


@given(st.one_of(st.floats(allow_nan=True), st.none()))
def test_num_is_json_safe(x):
    json.dumps(num(x), allow_nan=False)


def test_summary_mentions_verdicts(reports):
    assert "verdicts: explosive" not in reports["acr"].summary()
    assert "non-explosive-certified" in reports["acr"].summary()
