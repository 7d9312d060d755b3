"""Case files: parsing, evaluation and report entries.

A case file is ``{"cases": [...]}`` (or a bare list). Each case has an
``id``, a ``kind``, ``inputs`` and optional ``expect``. Inputs are inline
JSON objects or paths relative to the case file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .arrangements import (
    Arrangement,
    ArrangementError,
    build_lattice,
    char_poly,
    detect_splayed,
    flat_function,
    hypersurface_indicator,
    strat_poset_from_arrangement,
)
from .chow import GradedClass
from .lagrangian import cc, dual_csm
from .microlocal import (
    Composite,
    LinearEmbedding,
    NonCharacteristicError,
    Projection,
    is_noncharacteristic_diagonal,
    is_noncharacteristic_map,
    is_splayed_pair,
    support,
    verify_index_formula,
    verify_intersection_formula,
    verify_vrr,
)
from .strata import ConstructibleFunction, MissingDataError, NonLinearError, PosetError, StratPoset, csm, euler_integral

KINDS = {
    "intersection-formula": "intersection-formula-ambient",
    "vrr": "verdier-riemann-roch",
    "index-formula": "microlocal-index",
    "splayed-check": "splayed-pair",
    "noncharacteristic-check": "noncharacteristic",
    "csm-compute": "csm",
}


class CaseError(ValueError):
    """A case file or one of its cases is malformed."""


@dataclass
class Case:
    id: str
    kind: str
    inputs: dict
    expect: dict | None


def _resolve(value, base: Path):
    if isinstance(value, str):
        path = base / value
        try:
            return json.loads(path.read_text())
        except OSError as exc:
            raise CaseError(f"cannot read input {value!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CaseError(f"input {value!r} is not valid JSON: {exc}") from exc
    return value


def load_casefile(path: Path) -> list[Case]:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CaseError(f"cannot read case file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CaseError(f"case file is not valid JSON: {exc}") from exc
    raw = doc.get("cases") if isinstance(doc, dict) else doc
    if not isinstance(raw, list):
        raise CaseError("case file must be a list of cases or an object with a 'cases' list")
    base = Path(path).parent
    cases = []
    seen = set()
    for i, c in enumerate(raw):
        if not isinstance(c, dict):
            raise CaseError(f"case #{i} is not an object")
        cid = str(c.get("id", f"case-{i}"))
        if cid in seen:
            raise CaseError(f"duplicate case id {cid!r}")
        seen.add(cid)
        kind = c.get("kind")
        if kind not in KINDS:
            raise CaseError(f"case {cid!r}: unknown kind {kind!r}")
        inputs = c.get("inputs", {})
        if not isinstance(inputs, dict):
            raise CaseError(f"case {cid!r}: inputs must be an object")
        inputs = {k: _resolve(v, base) for k, v in inputs.items()}
        expect = c.get("expect")
        if expect is not None and not isinstance(expect, dict):
            raise CaseError(f"case {cid!r}: expect must be an object")
        case = Case(cid, kind, inputs, expect)
        build_inputs(case)  # parse errors surface before anything runs
        cases.append(case)
    return cases


# --- input documents ---------------------------------------------------------


def parse_map(doc: Any, base_dim: int | None = None):
    """``{"kind": "projection", "fiber_dim": a}``, ``{"kind": "embedding", "matrix": ...}``
    or ``{"kind": "composite", "maps": [innermost, ..., outermost]}``."""
    if not isinstance(doc, dict):
        raise CaseError("map must be an object")
    kind = doc.get("kind")
    try:
        if kind == "projection":
            base = doc.get("base_dim", base_dim)
            if base is None:
                raise CaseError("projection needs base_dim")
            return Projection(int(doc["fiber_dim"]), int(base))
        if kind == "embedding":
            return LinearEmbedding(doc["matrix"])
        if kind == "composite":
            maps = doc["maps"]
            parsed = [None] * len(maps)
            # base dimension of an innermost projection is the next map's source
            for i in range(len(maps) - 1, -1, -1):
                nxt = parsed[i + 1].source if i + 1 < len(maps) else base_dim
                parsed[i] = parse_map(maps[i], nxt)
            return Composite(tuple(parsed))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, CaseError):
            raise
        raise CaseError(f"malformed {kind} map: {exc}") from exc
    raise CaseError(f"unknown map kind {kind!r}")


def parse_function(doc: Any, poset: StratPoset) -> ConstructibleFunction:
    """``{"terms": [{"flat": [i, ...], "coeff": c}]}`` or ``{"values": {id: v}}``; None means 1 on the hypersurface."""
    if doc is None:
        if poset.arrangement is None:
            raise CaseError("a poset without an arrangement needs an explicit function")
        return hypersurface_indicator(poset)
    if not isinstance(doc, dict):
        raise CaseError("function must be an object")
    try:
        if "terms" in doc:
            return flat_function(poset, [(t["flat"], int(t["coeff"])) for t in doc["terms"]])
        if "values" in doc:
            return ConstructibleFunction(poset, {str(k): int(v) for k, v in doc["values"].items()})
    except (KeyError, TypeError, ValueError, ArrangementError, PosetError) as exc:
        raise CaseError(f"malformed function: {exc}") from exc
    raise CaseError("function needs 'terms' or 'values'")


def parse_poset(doc: Any) -> StratPoset:
    try:
        if isinstance(doc, dict) and "hyperplanes" in doc:
            return strat_poset_from_arrangement(Arrangement.from_json(doc))
        if isinstance(doc, dict) and "strata" in doc:
            return StratPoset.from_json(doc)
    except (ArrangementError, PosetError, ValueError) as exc:
        raise CaseError(str(exc)) from exc
    raise CaseError("expected an arrangement ({n, hyperplanes}) or a poset ({ambient_n, strata})")


def build_inputs(case: Case) -> dict:
    """Turn a case's raw inputs into model objects."""
    inp = case.inputs
    out: dict = {}
    try:
        shared = parse_poset(inp["P"]) if "P" in inp else None
        pa = parse_poset(inp["A"]) if "A" in inp else shared
        pb = parse_poset(inp["B"]) if "B" in inp else shared
        if case.kind in ("intersection-formula", "index-formula", "splayed-check") or (
            case.kind == "noncharacteristic-check" and "map" not in inp
        ):
            if pa is None or pb is None:
                raise CaseError("needs A and B (or a shared P)")
            out["alpha"] = parse_function(inp.get("alpha"), pa)
            out["beta"] = parse_function(inp.get("beta"), pb)
        else:
            if pa is None:
                raise CaseError("needs A (or P)")
            key = "gamma" if "gamma" in inp else "alpha"
            out["gamma"] = parse_function(inp.get(key), pa)
            if case.kind in ("vrr", "noncharacteristic-check"):
                if "map" not in inp:
                    raise CaseError("needs a map")
                out["map"] = parse_map(inp["map"], pa.ambient if isinstance(pa.ambient, int) else None)
    except CaseError as exc:
        raise CaseError(f"case {case.id!r}: {exc}") from exc
    return out


# --- evaluation --------------------------------------------------------------


def _class_eq(got: dict, want) -> bool:
    if isinstance(want, dict):
        want = want.get("coeffs")
    return got is not None and list(got["coeffs"]) == list(want)


def _compare(result: dict, expect: dict) -> list[str]:
    bad = []
    for key, want in expect.items():
        got = result.get(key)
        if key in ("lhs", "rhs", "csm", "dual_csm") and isinstance(got, dict):
            ok = _class_eq(got, want)
        else:
            ok = got == want
        if not ok:
            bad.append(f"{key}: expected {want!r}, got {got!r}")
    return bad


def _run_kind(case: Case, objs: dict) -> tuple[dict, bool]:
    """Return the result document and whether it counts as a hard failure."""
    if case.kind == "intersection-formula":
        r = verify_intersection_formula(objs["alpha"], objs["beta"], case_id=case.id)
        return r.to_json(), r.certified and not r.equal
    if case.kind == "index-formula":
        r = verify_index_formula(objs["alpha"], objs["beta"], case_id=case.id)
        return r.to_json(), not r.equal
    if case.kind == "vrr":
        r = verify_vrr(objs["map"], objs["gamma"], case_id=case.id)
        return r.to_json(), not r.equal
    if case.kind == "splayed-check":
        a, b = objs["alpha"], objs["beta"]
        if case.inputs.get("alpha") is None and case.inputs.get("beta") is None:
            v = detect_splayed(a.poset.arrangement, b.poset.arrangement)
        else:
            v = is_splayed_pair(a, b)
        return {"splayed": v.holds, "witness": v.witness}, False
    if case.kind == "noncharacteristic-check":
        if "map" in objs:
            v = is_noncharacteristic_map(objs["map"], support(objs["gamma"]))
        else:
            v = is_noncharacteristic_diagonal(support(objs["alpha"]), support(objs["beta"]))
        return {"noncharacteristic": v.holds, "witness": v.witness}, False
    gamma = objs["gamma"]
    doc = {
        "csm": csm(gamma).to_json(),
        "euler_integral": euler_integral(gamma),
        "cc": cc(gamma).to_json(),
    }
    if isinstance(gamma.poset.ambient, int):
        doc["dual_csm"] = dual_csm(gamma).to_json()
    if gamma.poset.arrangement is not None:
        doc["char_poly"] = list(char_poly(build_lattice(gamma.poset.arrangement)))
    return doc, False


def evaluate(case: Case) -> dict:
    """Evaluate one case into a report entry; never raises for model errors."""
    entry: dict = {"case_id": case.id, "kind": case.kind, "tag": KINDS[case.kind]}
    try:
        objs = build_inputs(case)
        result, hard_fail = _run_kind(case, objs)
    except NonCharacteristicError as exc:
        entry.update(status="refused", error=str(exc), witness=exc.witness)
        return entry
    except (MissingDataError, NonLinearError, PosetError, ArrangementError, ValueError) as exc:
        entry.update(status="error", error=f"{type(exc).__name__}: {exc}")
        return entry
    result.pop("case_id", None)
    result.pop("tag", None)
    entry["result"] = result
    mismatches = _compare(result, case.expect) if case.expect else []
    if mismatches:
        entry["status"] = "mismatch"
        entry["mismatches"] = mismatches
    elif hard_fail:
        entry["status"] = "failed"
    else:
        entry["status"] = "ok"
    return entry


def evaluate_raw(args: tuple[str, str, dict, dict | None]) -> dict:
    """Process-pool entry point; takes plain data so it pickles cheaply."""
    return evaluate(Case(*args))


def summary_line(entry: dict) -> str:
    res = entry.get("result", {})
    if entry["status"] in ("refused", "error"):
        detail = entry.get("error", "")
    elif "equal" in res:
        detail = f"{res.get('status', '')}; {res.get('hypothesis_status', 'hypothesis certified')}"
    elif "splayed" in res:
        detail = f"splayed={res['splayed']}"
    elif "noncharacteristic" in res:
        detail = f"noncharacteristic={res['noncharacteristic']}"
    else:
        detail = f"csm = {GradedClass.from_json(res['csm'])}" if "m" not in res.get("csm", {}) else "csm computed"
    return f"{entry['case_id']:<24} {entry['kind']:<24} {entry['status']:<9} {detail}"
