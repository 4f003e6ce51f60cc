"""Machine-readable analysis reports.

Reports hold JSON-ready values only, so ``AnalysisReport.from_json(r.to_json()) == r``.
Non-finite numbers are stored as the strings ``"inf"`` / ``"-inf"`` and
undefined ones as ``null``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import jsonschema
import numpy as np

from .classify import (
    ClassificationReport,
    InconsistentVerdict,
    Verdict,
    classify_network,
    default_box,
)
from .model import ReactionNetwork, as_ctmc
from .parser import format_network
from .stationary import (
    DEFAULT_TERMS,
    balance_residual,
    box_window,
    embedded_stationarity_residual,
    interval_window,
)
from .structure import check_complex_balanced, find_complex_balanced_equilibrium, structural_obstruction, structure_report

SCHEMA_VERSION = 1

_NUM = {"oneOf": [{"type": "number"}, {"enum": ["inf", "-inf"]}, {"type": "null"}]}
_EVIDENCE = {
    "type": "object",
    "required": ["criterion", "value", "lower", "upper", "detail"],
    "properties": {"criterion": {"type": "string"}, "value": _NUM, "lower": _NUM, "upper": _NUM,
                   "detail": {"type": "string"}},
    "additionalProperties": False,
}
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "network", "structure", "equilibrium", "stationary", "classification", "simulations"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "network": {
            "type": "object",
            "required": ["species", "text"],
            "properties": {"species": {"type": "array", "items": {"type": "string"}}, "text": {"type": "string"}},
        },
        "structure": {
            "type": "object",
            "required": ["complexes", "linkage_classes", "stoichiometric_dimension", "deficiency", "weakly_reversible"],
            "properties": {
                "complexes": {"type": "integer", "minimum": 1},
                "linkage_classes": {"type": "array", "items": {"type": "array", "items": {"type": "string"}}},
                "stoichiometric_dimension": {"type": "integer", "minimum": 0},
                "deficiency": {"type": "integer", "minimum": 0},
                "weakly_reversible": {"type": "boolean"},
            },
        },
        "equilibrium": {
            "type": "object",
            "required": ["found", "c", "max_relative_residual", "tolerance", "obstruction"],
            "properties": {
                "found": {"type": "boolean"},
                "c": {"oneOf": [{"type": "array", "items": {"type": "number"}}, {"type": "null"}]},
                "max_relative_residual": _NUM,
                "tolerance": {"type": "number"},
                "obstruction": {"type": "array", "items": {"type": "string"}},
            },
        },
        "stationary": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["description", "kind", "balance", "jump_rate"],
                "properties": {
                    "description": {"type": "string"},
                    "kind": {"enum": ["product-poisson", "birth-death", "table"]},
                    "balance": {"$ref": "#/$defs/residual"},
                    "embedded_balance": {"oneOf": [{"$ref": "#/$defs/residual"}, {"type": "null"}]},
                    "normalization": {"oneOf": [_EVIDENCE, {"type": "null"}]},
                    "jump_rate": _EVIDENCE,
                },
            },
        },
        "classification": {
            "type": "object",
            "required": ["verdicts", "evidence", "note"],
            "properties": {
                "verdicts": {"type": "array", "minItems": 1, "items": {"enum": [v.value for v in Verdict]}},
                "evidence": {"type": "array", "minItems": 1, "items": _EVIDENCE},
                "note": {"type": "string"},
            },
        },
        "simulations": {"type": "array", "items": {"type": "object"}},
    },
    "$defs": {
        "residual": {
            "type": "object",
            "required": ["max_scaled", "tolerance", "interior_states", "passes"],
            "properties": {
                "max_scaled": _NUM,
                "tolerance": {"type": "number"},
                "interior_states": {"type": "integer"},
                "passes": {"type": "boolean"},
            },
        }
    },
}


def num(x) -> Optional[float | str]:
    """JSON-safe number."""
    if x is None:
        return None
    x = float(x)
    if math.isnan(x):
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def to_float(x) -> float:
    if x is None:
        return math.nan
    if isinstance(x, str):
        return float(x)
    return float(x)


def evidence_json(e) -> dict:
    return {"criterion": e.criterion, "value": num(e.value), "lower": num(e.bound[0]), "upper": num(e.bound[1]),
            "detail": e.detail}


def classification_json(rep: ClassificationReport) -> dict:
    return {"verdicts": rep.tags, "evidence": [evidence_json(e) for e in rep.evidence], "note": rep.note}


def _residual_json(res, tol: float) -> dict:
    return {"max_scaled": num(res.max_scaled), "tolerance": tol, "interior_states": len(res.residuals),
            "passes": res.passes(tol)}


@dataclass
class AnalysisReport:
    network: dict
    structure: dict
    equilibrium: dict
    stationary: list
    classification: dict
    simulations: list = field(default_factory=list)
    schema: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> None:
        jsonschema.validate(self.to_dict(), REPORT_SCHEMA)
        tags = self.classification["verdicts"]
        if Verdict.NON_EXPLOSIVE_CERTIFIED.value in tags and Verdict.EXPLOSIVE.value in tags:
            raise InconsistentVerdict("report carries contradictory verdicts")

    def to_json(self, **kw) -> str:
        self.validate()
        return json.dumps(self.to_dict(), allow_nan=False, **kw)

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        data = json.loads(text)
        jsonschema.validate(data, REPORT_SCHEMA)
        return cls(**data)

    @property
    def verdicts(self) -> list[str]:
        return list(self.classification["verdicts"])

    def summary(self) -> str:
        s = self.structure
        lines = [
            f"species: {', '.join(self.network['species'])}",
            f"complexes {s['complexes']}, linkage classes {len(s['linkage_classes'])}, "
            f"stoichiometric dimension {s['stoichiometric_dimension']}, deficiency {s['deficiency']}",
            f"weakly reversible: {'yes' if s['weakly_reversible'] else 'no'}",
        ]
        eq = self.equilibrium
        if eq["found"]:
            lines.append(f"complex balanced equilibrium c = {eq['c']} (max relative residual {eq['max_relative_residual']})")
        elif eq["obstruction"]:
            lines.append(f"no complex balanced equilibrium: complexes {', '.join(eq['obstruction'])} cannot balance")
        else:
            lines.append("no complex balanced equilibrium found")
        for m in self.stationary:
            jr = m["jump_rate"]
            lines.append(
                f"stationary measure {m['description']}: balance {m['balance']['max_scaled']} "
                f"(tol {m['balance']['tolerance']}), expected jump rate {jr['value']} [{jr['lower']}, {jr['upper']}] "
                f"({jr['detail']})"
            )
        lines.append("verdicts: " + ", ".join(self.classification["verdicts"]))
        for e in self.classification["evidence"]:
            lines.append(f"  - {e['criterion']}: {e['value']} in [{e['lower']}, {e['upper']}] {e['detail']}")
        if self.classification["note"]:
            lines.append("note: " + self.classification["note"])
        return "\n".join(lines)


def analyze_network(
    net: ReactionNetwork,
    window: Optional[int] = None,
    tol: float = 1e-8,
    terms: int = DEFAULT_TERMS,
) -> AnalysisReport:
    """Structure, equilibrium, stationary measures and verdicts of ``net``."""
    st = structure_report(net)
    structure = {
        "complexes": st.complex_count,
        "linkage_classes": [[net.complex_label(y) for y in cls] for cls in st.linkage_classes],
        "stoichiometric_dimension": st.stoichiometric_dimension,
        "deficiency": st.deficiency,
        "weakly_reversible": st.weakly_reversible,
    }
    obstruction = [net.complex_label(y) for y in structural_obstruction(net)]
    c = None if obstruction else find_complex_balanced_equilibrium(net)
    equilibrium = {
        "found": c is not None,
        "c": None if c is None else [float(v) for v in c],
        "max_relative_residual": None if c is None else num(check_complex_balanced(net, c).max_relative),
        "tolerance": 1e-10,
        "obstruction": obstruction,
    }
    cls = classify_network(net, window=window, tol=tol, terms=terms)
    spec = as_ctmc(net)
    stationary = []
    if cls.measure is not None:
        pi = cls.measure
        if pi.kind == "birth-death":
            lowest = pi.params["lowest"]
            states = interval_window(lowest, lowest + (200 if window is None else window))
        else:
            states = default_box(net.dimension) if window is None else box_window([window] * net.dimension)
        bal = balance_residual(spec, pi, states)
        rate = cls.certificate.jump_rate if cls.certificate else None
        rate_ev = next(e for e in cls.evidence if "jump rate" in e.criterion)
        entry = {
            "description": pi.description,
            "kind": pi.kind,
            "balance": _residual_json(bal, tol),
            "embedded_balance": None,
            "normalization": None,
            "jump_rate": evidence_json(rate_ev),
        }
        if pi.normalization is not None:
            s = pi.normalization
            entry["normalization"] = {"criterion": "normalizing sum", "value": num(s.value), "lower": num(s.lower),
                                      "upper": num(s.upper), "detail": s.test}
        if rate is not None and rate.finite:
            entry["embedded_balance"] = _residual_json(embedded_stationarity_residual(spec, pi, states), tol)
        stationary.append(entry)
    return AnalysisReport(
        network={"species": list(net.species), "text": format_network(net)},
        structure=structure,
        equilibrium=equilibrium,
        stationary=stationary,
        classification=classification_json(cls),
    )
