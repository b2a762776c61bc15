"""JSON encodings of spaces, partitions, translations, operators and certificates.

Point ids are JSON scalars; points of ``Z^d`` windows (tuples) travel as
lists and come back as tuples.  Decoders raise :class:`ValidationError` with
a dotted pointer to the offending field.
"""

from __future__ import annotations

import json
import math
import re
from fractions import Fraction

import numpy as np

from .amen import EmptyInterior, FolnerExhaustion, FolnerWitness, HallViolation, ParadoxCertificate
from .errors import ValidationError
from .ktheory.towers import TowerSpec
from .roe.norms import NormEstimate
from .roe.operator import SparseOperator
from .space import Partition, Space
from .translations import PartialTranslation, from_pairs


def point_to_json(x):
    return list(x) if isinstance(x, tuple) else x


def point_from_json(x):
    return tuple(point_from_json(c) for c in x) if isinstance(x, list) else x


def _field(obj, key, path, kind=None):
    if not isinstance(obj, dict):
        raise ValidationError(f"{path or '<root>'}: expected an object")
    if key not in obj:
        raise ValidationError(f"{path}.{key}: missing" if path else f"{key}: missing")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise ValidationError(f"{path + '.' if path else ''}{key}: expected {_kind_name(kind)}")
    return value


def _kind_name(kind):
    if isinstance(kind, tuple):
        return " or ".join(k.__name__ for k in kind)
    return kind.__name__


def _int(v, path):
    if not isinstance(v, int) or isinstance(v, bool):
        raise ValidationError(f"{path}: expected an integer")
    return v


# --------------------------------------------------------------------------
# spaces and partitions


def tag_to_json(tag: dict) -> dict:
    return {k: (v.to_json() if isinstance(v, TowerSpec) else v) for k, v in tag.items()}


def tag_from_json(tag: dict) -> dict:
    out = dict(tag)
    if "tower" in out:
        out["tower"] = TowerSpec.from_json(out["tower"])
    return out


def space_to_json(space: Space) -> dict:
    m = space.metric
    out = {
        "family_tag": tag_to_json(space.family_tag),
        "points": [point_to_json(x) for x in space.points],
        "metric": [[int(v) for v in m[i, :i + 1]] for i in range(len(space))],
    }
    if space.blocks is not None:
        out["blocks"] = [[point_to_json(x) for x in b] for b in space.blocks]
    return out


def space_from_json(obj) -> Space:
    tag = _field(obj, "family_tag", "space", dict)
    if "kind" not in tag:
        raise ValidationError("space.family_tag.kind: missing")
    points = [point_from_json(x) for x in _field(obj, "points", "space", list)]
    rows = _field(obj, "metric", "space", list)
    n = len(points)
    if len(rows) != n:
        raise ValidationError(f"space.metric: expected {n} rows, got {len(rows)}")
    m = np.zeros((n, n), dtype=np.int64)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != i + 1:
            raise ValidationError(f"space.metric[{i}]: expected {i + 1} entries")
        for j, v in enumerate(row):
            m[i, j] = m[j, i] = _int(v, f"space.metric[{i}][{j}]")
    blocks = obj.get("blocks")
    if blocks is not None:
        blocks = tuple(tuple(point_from_json(x) for x in b) for b in blocks)
    try:
        space = Space(tuple(points), m, tag_from_json(tag), blocks)
        space.validate()
    except ValidationError as exc:
        raise ValidationError(f"space.metric: {exc}") from None
    return space


def partition_to_json(part: Partition) -> dict:
    return {"parameter": part.parameter,
            "classes": [[point_to_json(x) for x in c] for c in part.classes]}


def partition_from_json(obj) -> Partition:
    param = _int(_field(obj, "parameter", "partition"), "partition.parameter")
    classes = _field(obj, "classes", "partition", list)
    return Partition(tuple(tuple(point_from_json(x) for x in c) for c in classes), param)


# --------------------------------------------------------------------------
# translations and operators


def translation_to_json(t: PartialTranslation) -> dict:
    return {"pairs": [[point_to_json(x), point_to_json(y)] for x, y in t.pairs()],
            "displacement": t.displacement}


def translation_from_json(space: Space, obj) -> PartialTranslation:
    pairs = _field(obj, "pairs", "translation", list)
    try:
        t = from_pairs(space, [(point_from_json(x), point_from_json(y)) for x, y in pairs])
    except KeyError as exc:
        raise ValidationError(f"translation.pairs: {exc.args[0]}") from None
    if "displacement" in obj and obj["displacement"] != t.displacement:
        raise ValidationError("translation.displacement: does not match the pairs")
    return t


def operator_to_json(a: SparseOperator) -> dict:
    return {
        "space_id": a.space.space_id,
        "triplets": [[point_to_json(x), point_to_json(y), v.numerator, v.denominator]
                     for (x, y), v in a.items()],
    }


def operator_from_json(space: Space, obj) -> SparseOperator:
    sid = _field(obj, "space_id", "operator", str)
    if sid != space.space_id:
        raise ValidationError(f"operator.space_id: {sid!r} does not match {space.space_id!r}")
    trips = _field(obj, "triplets", "operator", list)
    entries = {}
    for k, t in enumerate(trips):
        path = f"operator.triplets[{k}]"
        if not isinstance(t, list) or len(t) != 4:
            raise ValidationError(f"{path}: expected [row, col, num, den]")
        x, y = point_from_json(t[0]), point_from_json(t[1])
        num, den = _int(t[2], f"{path}[2]"), _int(t[3], f"{path}[3]")
        if den == 0:
            raise ValidationError(f"{path}[3]: zero denominator")
        for pt, pos in ((x, 0), (y, 1)):
            if pt not in space:
                raise ValidationError(f"{path}[{pos}]: point {pt!r} not in the space")
        entries[x, y] = entries.get((x, y), 0) + Fraction(num, den)
    return SparseOperator.from_points(space, entries)


def norm_to_json(est: NormEstimate) -> dict:
    return est.to_json()


# --------------------------------------------------------------------------
# amenability artefacts


def certificate_to_json(cert: ParadoxCertificate) -> dict:
    return {
        "R": cert.R, "collar": cert.collar,
        "interior": [point_to_json(x) for x in cert.interior],
        "plus_pairs": [[point_to_json(x), point_to_json(y)] for x, y in cert.plus_pairs],
        "minus_pairs": [[point_to_json(x), point_to_json(y)] for x, y in cert.minus_pairs],
    }


def certificate_from_json(obj) -> ParadoxCertificate:
    R = _int(_field(obj, "R", "certificate"), "certificate.R")
    collar = _int(_field(obj, "collar", "certificate"), "certificate.collar")
    interior = tuple(point_from_json(x) for x in _field(obj, "interior", "certificate", list))
    branches = []
    for key in ("plus_pairs", "minus_pairs"):
        pairs = _field(obj, key, "certificate", list)
        for k, p in enumerate(pairs):
            if not isinstance(p, list) or len(p) != 2:
                raise ValidationError(f"certificate.{key}[{k}]: expected [src, dst]")
        branches.append(tuple((point_from_json(x), point_from_json(y)) for x, y in pairs))
    return ParadoxCertificate(R, collar, interior, *branches)


def hall_to_json(v: HallViolation) -> dict:
    return {"R": v.R, "collar": v.collar,
            "left": [[point_to_json(x), s] for x, s in v.left],
            "neighbors": [point_to_json(y) for y in v.neighbors],
            "deficiency": v.deficiency, "note": v.note}


def hall_from_json(obj) -> HallViolation:
    R = _int(_field(obj, "R", "hall_violation"), "hall_violation.R")
    collar = _int(_field(obj, "collar", "hall_violation"), "hall_violation.collar")
    left = tuple((point_from_json(x), s) for x, s in _field(obj, "left", "hall_violation", list))
    nbrs = tuple(point_from_json(y) for y in _field(obj, "neighbors", "hall_violation", list))
    return HallViolation(R, collar, left, nbrs)


def frac_to_json(q: Fraction) -> str:
    return str(Fraction(q))


def folner_to_json(res) -> dict:
    if isinstance(res, FolnerWitness):
        return {"found": True, "set": [point_to_json(x) for x in res.set], "R": res.R,
                "ratio": frac_to_json(res.ratio), "window": res.window}
    if isinstance(res, FolnerExhaustion):
        return {"found": False, "R": res.R, "eps": frac_to_json(res.eps),
                "min_ratio": frac_to_json(res.min_ratio),
                "best_set_size": len(res.best_set), "scanned": res.scanned,
                "strategy": res.strategy, "note": res.note}
    raise TypeError(type(res))


def empty_interior_to_json(e: EmptyInterior) -> dict:
    return {"R": e.R, "collar": e.collar, "reason": e.reason}


# --------------------------------------------------------------------------
# output


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, float) and math.isinf(o):
        return "inf"
    if hasattr(o, "to_json"):
        return o.to_json()
    if isinstance(o, (set, frozenset, tuple)):
        return list(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def dumps(obj, pretty=False) -> str:
    """Deterministic JSON (sorted keys); ``inf`` is written as the string ``"inf"``."""
    return json.dumps(_sanitize(obj), sort_keys=True, default=_default,
                      indent=2 if pretty else None, separators=None if pretty else (",", ":"))


def _sanitize(o):
    if isinstance(o, float) and math.isinf(o):
        return "inf" if o > 0 else "-inf"
    if isinstance(o, dict):
        return {str(k): _sanitize(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_sanitize(v) for v in o]
    return o


# --------------------------------------------------------------------------
# rebuilding a built-in window from its id

_ID = re.compile(r"^(\w+)\((.*)\)$")


def _split_args(s):
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += ch == "["
        depth -= ch == "]"
        cur += ch
    if cur:
        out.append(cur)
    return out


def _parse_list(s):
    return [int(v) for v in s.strip("[]").split(",") if v]


def space_from_id(space_id: str) -> Space:
    """Rebuild a built-in window from ``Space.space_id``; explicit spaces need their JSON."""
    from .space import free_group_ball, gap_union, tower_window, z_window, zd_window

    m = _ID.match(space_id)
    if not m or m.group(1) == "Explicit":
        raise ValidationError(f"space_id {space_id!r}: cannot rebuild; pass the space JSON")
    kind = m.group(1)
    args = dict(a.split("=", 1) for a in _split_args(m.group(2)))
    try:
        if kind == "ZWindow":
            sp = z_window(int(args["n"]), int(args["start"]))
        elif kind == "ZdWindow":
            sp = zd_window(int(args["d"]), int(args["n"]))
        elif kind == "FreeGroupBall":
            sp = free_group_ball(int(args["k"]), int(args["radius"]))
        elif kind == "GapUnion":
            sp = gap_union(_parse_list(args["sizes"]), _parse_list(args["gaps"]))
        elif kind == "TowerGroupWindow":
            pre, cyc = args["tower"].split("|")
            sp = tower_window(TowerSpec(tuple(_parse_list(pre)), tuple(_parse_list(cyc))),
                              int(args["level"]))
        else:
            raise ValidationError(f"space_id {space_id!r}: unknown kind {kind!r}")
    except (KeyError, ValueError) as exc:
        raise ValidationError(f"space_id {space_id!r}: malformed ({exc})") from None
    if sp.space_id != space_id:
        raise ValidationError(f"space_id {space_id!r}: rebuilt as {sp.space_id!r}")
    return sp
