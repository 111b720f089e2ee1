"""Reading and writing group specification files (JSON or YAML).

Format::

    q: 2
    A_group: {names: [1, a], permutations: [[1, 2], [2, 1]]}
    B_group: {names: [1, b, c, d], table: [[...], ...]}
        # or  {elementary_abelian: {p: 2, d: 2}, names: [...]}
    epimorphisms:
      "0": {map: {b: a, c: a, d: 1}}     # unlisted identity maps to identity
      "1": {functional: [1, 0]}          # elementary abelian B, cyclic A
    omega: {prefix: "", period: "012"}

A file may instead carry ``preset: {name: holt, ...}`` plus ``omega``.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
import yaml

from .errors import NotAdmissible, ParseError, ValidationError
from .finite_algebra import (
    SpinalData,
    build_epimorphism,
    build_group,
    group_from_permutations,
    validate_action,
    validate_spinal_data,
)
from .omega import OmegaSequence, is_admissible
from .presets import elementary_abelian, grigorchuk2, grigorchukP, holt

PRESET_NAMES = ("grigorchuk2", "grigorchukP", "holt")


def spec_hash(spec: dict) -> str:
    blob = json.dumps(spec, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _seq(v) -> list[str]:
    if v is None:
        return []
    if isinstance(v, str):
        return list(v)
    return [str(x) for x in v]


def parse_omega(d) -> OmegaSequence:
    if isinstance(d, str):
        return OmegaSequence.parse(d)
    if not isinstance(d, dict) or "period" not in d:
        raise ParseError("omega needs a period")
    return OmegaSequence(_seq(d.get("prefix")), _seq(d["period"]))


def _from_preset(p: dict, omega):
    name = p.get("name")
    if name == "grigorchuk2":
        return grigorchuk2(omega or p.get("omega", "012"))
    if name == "grigorchukP":
        data, om = grigorchukP(int(p["p"]), p.get("period"), p.get("prefix", ()))
        return data, omega or om
    if name == "holt":
        return holt(omega or p.get("omega", "0123456789AB"))
    raise ParseError(f"unknown preset {name!r}")


def spec_from_dict(d: dict, check_admissible: bool = True) -> tuple[SpinalData, OmegaSequence]:
    data, omega = _spec_from_dict(d)
    if check_admissible and not is_admissible(omega, data):
        raise NotAdmissible(f"omega {omega} is not admissible for this data")
    return data, omega


def _spec_from_dict(d: dict) -> tuple[SpinalData, OmegaSequence]:
    omega = parse_omega(d["omega"]) if "omega" in d else None
    if "preset" in d and "A_group" not in d:
        return _from_preset(d["preset"], omega)
    try:
        q = int(d["q"])
        A = d["A_group"]
        GA = group_from_permutations(A["permutations"], [str(s) for s in A["names"]])
        action = validate_action(GA, A["permutations"])
        if action.q != q:
            raise ValidationError(f"A_group acts on {action.q} points but q = {q}")
        B = d["B_group"]
        vecs = None
        if "elementary_abelian" in B:
            ea = B["elementary_abelian"]
            GB, vecs = elementary_abelian(int(ea["p"]), int(ea["d"]), B.get("names"))
            p_ea = int(ea["p"])
        else:
            GB = build_group(B["table"], [str(s) for s in B["names"]], "G_B")
        epis = {}
        for eid, e in d["epimorphisms"].items():
            eid = str(eid)
            if "functional" in e:
                if vecs is None:
                    raise ParseError("functional epimorphisms need an elementary abelian B_group")
                images = (vecs @ np.asarray(e["functional"])) % p_ea
                # A element k is the rotation y -> y + k
                rot = {}
                for x, row in enumerate(action.images):
                    k = row[0]
                    if all(row[y] == (y + k) % q for y in range(q)):
                        rot[k] = x
                if len(rot) != q:
                    raise ParseError("functional epimorphisms need A = Z/q acting by rotation")
                epis[eid] = build_epimorphism(GB, GA, [rot[int(k)] for k in images], eid)
            else:
                m = {str(k): str(v) for k, v in e["map"].items()}
                m.setdefault(GB.names[GB.identity], GA.names[GA.identity])
                epis[eid] = build_epimorphism(GB, GA, m, eid)
    except KeyError as exc:
        raise ParseError(f"missing field {exc}") from None
    data = SpinalData(action, GB, epis)
    validate_spinal_data(data)
    if omega is None:
        raise ParseError("spec has no omega")
    return data, omega


def load_spec_file(path) -> dict:
    text = Path(path).read_text()
    try:
        if str(path).endswith(".json"):
            return json.loads(text)
        return yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ParseError(f"cannot parse {path}: {exc}") from None


def load_spec(path=None, preset: str | None = None, omega: str | None = None,
              p: int | None = None) -> tuple[SpinalData, OmegaSequence]:
    """Validated spec from a file or a preset name."""
    if path is not None:
        d = load_spec_file(path)
        if omega is not None:
            d["omega"] = omega
    elif preset is not None:
        d = preset_dict(preset, omega, p)
    else:
        raise ParseError("need a spec file or a preset")
    return spec_from_dict(d)


def preset_dict(name: str, omega: str | None = None, p: int | None = None) -> dict:
    d: dict = {"preset": {"name": name}}
    if name == "grigorchukP":
        d["preset"]["p"] = int(p or 3)
    if omega is not None:
        d["omega"] = omega
    return d


def spec_to_dict(data: SpinalData, omega: OmegaSequence, max_table: int = 512) -> dict:
    """Explicit serialization (tables and element maps)."""
    GA, GB = data.root_group, data.level_group
    if GB.order > max_table:
        raise ValidationError(f"level group of order {GB.order} is too large for an explicit table")
    return {
        "q": data.q,
        "A_group": {
            "names": list(GA.names),
            "permutations": [[y + 1 for y in row] for row in data.action.images],
        },
        "B_group": {"names": list(GB.names), "table": GB.mul.tolist()},
        "epimorphisms": {
            eid: {"map": {GB.names[x]: GA.names[e(x)] for x in range(GB.order)}}
            for eid, e in data.epis.items()
        },
        "omega": {"prefix": list(omega.prefix), "period": list(omega.period)},
    }


def dump_spec(d: dict, path) -> None:
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(d, indent=1))
    else:
        path.write_text(yaml.safe_dump(d, sort_keys=False))
