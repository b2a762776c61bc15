"""``coarsekit`` command line: one command, one JSON report on stdout.

Exit status 0 means a verdict was computed (it may be "no" or
"undetermined"), 1 means the input was rejected, 2 means an internal
identity or invariant check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__, amen
from . import serialize as ser
from .errors import IdentityFailure, InvariantViolation, PreconditionError, ValidationError
from .ktheory import (K0Class, TowerSpec, class_equal, class_positive, coarse_class,
                      compare_towers, supernatural, truncated_limit_oracle)
from .roe import (block_decompose, cuntz_build, ideal_witness, leavitt_verify, mv_glue,
                  mv_split, norm1_exact, norm_bounds, norm_inf_exact, qd_projection,
                  standard_form_witness)
from .space import (asdim_one_decomposition, check_uv_decomposition, growth_profile,
                    make_window, parse_family, r_components, separated_partition)


# --------------------------------------------------------------------------
# input helpers


def load_json(value: str, what: str):
    """Inline JSON (starting with ``{`` or ``[``) or a path to a JSON file."""
    text = value.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(value).read_text()
        except OSError as exc:
            raise ValidationError(f"{what}: cannot read {value!r} ({exc.strerror})") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{what}: malformed JSON at line {exc.lineno} column {exc.colno}: "
                              f"{exc.msg}") from None


def _family(value):
    v = value.strip()
    return parse_family(load_json(v, "--family") if v.startswith("{") else v)


def _space(args):
    if getattr(args, "space", None):
        return ser.space_from_json(load_json(args.space, "--space"))
    if getattr(args, "family", None) is None:
        raise ValidationError("--family/--size or --space is required")
    if args.size is None:
        raise ValidationError("--size is required with --family")
    return make_window(_family(args.family), args.size)


def _operator(value, space, what="--op"):
    obj = load_json(value, what)
    if space is None:
        space = ser.space_from_id(obj.get("space_id", "") if isinstance(obj, dict) else "")
    try:
        return ser.operator_from_json(space, obj)
    except ValidationError as exc:
        raise ValidationError(f"{what}: {exc}") from None


def _points(value, what):
    pts = load_json(value, what)
    if not isinstance(pts, list):
        raise ValidationError(f"{what}: expected a list of point ids")
    return [ser.point_from_json(x) for x in pts]


def _check_points(space, pts, what):
    for k, x in enumerate(pts):
        if x not in space:
            raise ValidationError(f"{what}[{k}]: point {x!r} not in {space.space_id}")
    return pts


def _frac(value, what):
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ValidationError(f"{what}: expected a rational number, got {value!r}") from None


def _p(value):
    if str(value).lower() in ("inf", "infinity"):
        return math.inf
    p = _frac(value, "--p")
    if p < 1:
        raise ValidationError("--p: must be >= 1")
    return p


def _tower(value, what):
    return TowerSpec.from_json(load_json(value, what))


def _class(value, what):
    obj = load_json(value, what)
    if isinstance(obj, list):
        return K0Class.finite(obj) if all(isinstance(v, int) for v in obj) else _bad(what)
    try:
        return K0Class.from_json(obj)
    except ValidationError as exc:
        raise ValidationError(f"{what}: {exc}") from None


def _bad(what):
    raise ValidationError(f"{what}: expected a list of integers or a K0Class object")


def _fjson(q):
    return str(Fraction(q))


# --------------------------------------------------------------------------
# commands


def cmd_space_gen(args):
    space = _space(args)
    return {"space": ser.space_to_json(space), "space_id": space.space_id}, "generated"


def cmd_space_analyze(args):
    space = _space(args)
    R = args.R
    comps = r_components(space, R)
    sep = separated_partition(space, max(R, 1))
    out = {
        "space_id": space.space_id,
        "points": len(space),
        "growth_profile": dict(zip(map(str, range(R + 1)), growth_profile(space, range(R + 1)))),
        "r_components": {"count": len(comps), "max_size": max(comps.sizes())},
        "separated_partition": {"S": sep.separation, "classes": len(sep)},
    }
    if args.asdim_one:
        fam = _family(args.family)
        uv = asdim_one_decomposition(fam, R, args.size)
        out["asdim_one"] = {"u_pieces": len(uv.u_pieces), "v_pieces": len(uv.v_pieces),
                            "bound": uv.bound, "verified": check_uv_decomposition(
                                make_window(fam, args.size), uv)}
    return out, "analyzed"


def cmd_folner(args):
    res = amen.folner_search(_family(args.family), args.R, _frac(args.eps, "--eps"),
                             args.strategy, args.max_radius, args.max_size)
    found = isinstance(res, amen.FolnerWitness)
    return {"folner": ser.folner_to_json(res)}, "found" if found else "exhausted"


def _paradox_result(space, res):
    if isinstance(res, amen.ParadoxCertificate):
        amen.verify_certificate(space, res)
        return {"certificate": ser.certificate_to_json(res)}, "certificate"
    if isinstance(res, amen.HallViolation):
        amen.verify_hall_violation(space, res)
        return {"hall_violation": ser.hall_to_json(res)}, "hall_violation"
    return {"empty_interior": ser.empty_interior_to_json(res)}, "empty_interior"


def cmd_paradox(args):
    space = _space(args)
    if args.verify:
        obj = load_json(args.verify, "--verify")
        if isinstance(obj, dict) and "result" in obj:
            obj = obj["result"]
        if isinstance(obj, dict) and "certificate" in obj:
            obj = obj["certificate"]
        if isinstance(obj, dict) and "hall_violation" in obj:
            viol = ser.hall_from_json(obj["hall_violation"])
            try:
                amen.verify_hall_violation(space, viol)
            except KeyError as exc:
                raise ValidationError(f"hall_violation: {exc.args[0]}") from None
            return {"verified": True, "hall_violation": ser.hall_to_json(viol)}, "hall_violation"
        cert = ser.certificate_from_json(obj)
        try:
            amen.verify_certificate(space, cert)
        except KeyError as exc:
            raise ValidationError(f"certificate: {exc.args[0]}") from None
        return {"verified": True, "certificate": ser.certificate_to_json(cert)}, "certificate"
    try:
        res = amen.paradox_certificate(space, args.R, args.collar)
    except PreconditionError as exc:
        raise ValidationError(f"--collar: {exc}") from None
    out, verdict = _paradox_result(space, res)
    out["space_id"] = space.space_id
    return out, verdict


def cmd_cuntz(args):
    space = _space(args)
    res = amen.paradox_certificate(space, args.R, args.collar)
    if not isinstance(res, amen.ParadoxCertificate):
        out, verdict = _paradox_result(space, res)
        return out, "no_certificate"
    fam = cuntz_build(space, res)
    rep = leavitt_verify(fam)
    if not rep.all_hold:
        failed = [k for k, ok in rep.relations.items() if not ok]
        raise IdentityFailure(failed[0])
    e, _ = standard_form_witness(fam)
    return {
        "space_id": space.space_id,
        "relations": rep.relations,
        "interior_size": rep.interior_size,
        "range_size": rep.range_size,
        "unmatched": len(rep.unmatched),
        "standard_form": {"e = S1 T1 idempotent": e @ e == e, "e ~ 1_I": True,
                          "1_range - e ~ 1_I": True},
    }, "leavitt_relations_hold"


def cmd_ideal(args):
    space = _space(args)
    A = _check_points(space, _points(args.A, "--A"), "--A") if args.A else list(space.points)
    B = _check_points(space, _points(args.B, "--B"), "--B")
    try:
        w = ideal_witness(space, A, B, args.R)
    except PreconditionError as exc:
        raise ValidationError(f"--A/--B: {exc}") from None
    return {
        "space_id": space.space_id,
        "classes": len(w.partition),
        "counts": [[ser.point_to_json(y), _fjson(c)] for y, c in w.counts.items()],
        "f": [[ser.point_to_json(y), _fjson(v)] for y, v in sorted(
            w.f.diagonal().items(), key=lambda kv: space.index(kv[0]))],
        "identity_verified": True,
    }, "in_ideal"


def cmd_qd(args):
    space = _space(args)
    ops = [_operator(v, space, f"--op[{k}]") for k, v in enumerate(args.op or [])]
    vecs = []
    for k, v in enumerate(args.vector or []):
        obj = load_json(v, f"--vector[{k}]")
        if not isinstance(obj, list):
            raise ValidationError(f"--vector[{k}]: expected [[point, value], ...]")
        vecs.append({ser.point_from_json(x): _frac(c, f"--vector[{k}]") for x, c in obj})
    try:
        cert = qd_projection(space, ops, vecs, _frac(args.eps, "--eps"), _p(args.p))
    except PreconditionError as exc:
        raise ValidationError(str(exc)) from None
    return {"space_id": space.space_id, "n": cert.n, "commutators_zero": cert.commutators_zero,
            "norm_1": _fjson(cert.norm_1), "norm_inf": _fjson(cert.norm_inf)}, "projection_found"


def cmd_norm(args):
    space = _space(args) if (args.space or args.family) else None
    a = _operator(args.op, space)
    p = _p(args.p)
    est = norm_bounds(a, float(p), seed=args.seed, starts=args.starts)
    out = {"space_id": a.space.space_id, "norm": est.to_json(), "propagation": a.propagation}
    if p == 1:
        out["exact"] = _fjson(norm1_exact(a))
    elif math.isinf(p):
        out["exact"] = _fjson(norm_inf_exact(a))
    return out, "exact" if est.exact else "interval"


def cmd_mv(args):
    fam = _family(args.family)
    uv = asdim_one_decomposition(fam, args.r, args.size)
    space = make_window(fam, args.size)
    a = _operator(args.op, space)
    x1, x2 = mv_split(a, uv)
    n = {k: norm1_exact(v) for k, v in (("a", a), ("x1", x1), ("x2", x2))}
    out = {"space_id": space.space_id, "split": {
        "x1 + x2 = a": True,
        "norm1": {k: _fjson(v) for k, v in n.items()},
        "max(x1, x2) <= a": max(n["x1"], n["x2"]) <= n["a"]}}
    verdict = "split"
    if args.op_b:
        b = _operator(args.op_b, space, "--op-b")
        try:
            c = mv_glue(a, b, uv, args.r)
        except PreconditionError as exc:
            raise ValidationError(str(exc)) from None
        eps = norm1_exact(a - b)
        da, db = norm1_exact(a - c), norm1_exact(b - c)
        bound = Fraction(5, 2) * eps
        out["glue"] = {"eps = |a-b|_1": _fjson(eps), "|a-c|_1": _fjson(da), "|b-c|_1": _fjson(db),
                       "within 5/2 eps": da <= bound and db <= bound,
                       "c": ser.operator_to_json(c)}
        verdict = "glued"
    return out, verdict


def cmd_blocks(args):
    space = _space(args) if (args.space or args.family) else None
    a = _operator(args.op, space)
    dec = block_decompose(a, args.r)
    return {"space_id": a.space.space_id, "exact": dec.exact,
            "block_sizes": dec.partition.sizes(), "residue_nnz": dec.residue.nnz,
            "residue": ser.operator_to_json(dec.residue)}, "exact" if dec.exact else "residue"


def cmd_ktheory(args):
    sub = args.ksub
    if sub == "sn":
        t = _tower(args.tower, "--tower")
        return {"tower": t.to_json(), "supernatural": supernatural(t).to_json(),
                "display": str(supernatural(t)), "coarse_class": str(coarse_class(t))}, "computed"
    if sub == "compare":
        t1, t2 = _tower(args.t1, "--t1"), _tower(args.t2, "--t2")
        rep = compare_towers(t1, t2)
        return {"t1": str(supernatural(t1)), "t2": str(supernatural(t2)), "flags": rep}, \
            "equivalent" if all(rep.values()) else "compared"
    t = _tower(args.tower, "--tower")
    if args.budget < 1:
        raise ValidationError("--budget: must be >= 1")
    if sub == "class-equal":
        v = class_equal(_class(args.x, "--x"), _class(args.y, "--y"), t, args.budget)
        return {"verdict": v.to_json()}, v.result
    if sub == "class-positive":
        v = class_positive(_class(args.x, "--x"), t, args.budget)
        return {"verdict": v.to_json()}, v.result
    # oracle
    orc = truncated_limit_oracle(t, args.N, args.L)
    out = {"dims": orc.dims}
    if args.x:
        x = _class(args.x, "--x")
        if any(x.period):
            raise ValidationError("--x: the oracle takes finitely supported sequences")
        seq = list(x.preperiod)
        if len(seq) > orc.width:
            raise ValidationError(f"--x: support longer than the truncation width {orc.width}")
        out.update({
            "zero_stage": orc.zero_stage(seq),
            "positive_stage": orc.positive_stage(seq),
            "images": [[int(c) for c in v] for v in orc.images(seq)],
            "class_equal": class_equal(x, K0Class(), t, args.budget).to_json(),
            "class_positive": class_positive(x, t, args.budget).to_json(),
        })
    return out, "computed"


def cmd_report(args):
    """A fixed desk-scale tour; every entry is recomputed, nothing is cached."""
    from .space import free_group_ball, z_window

    f2 = free_group_ball(2, 5)
    cert = amen.paradox_certificate(f2, 1, 1)
    rep = leavitt_verify(cuntz_build(f2, cert))
    z20 = z_window(20)
    hall = amen.paradox_certificate(z20, 1, 1)
    amen.verify_hall_violation(z20, hall)
    towers = {"2^n": TowerSpec.constant(2), "4^n": TowerSpec.constant(4),
              "6^n": TowerSpec.constant(6), "Finite(4)": TowerSpec.finite(4)}
    pairs = [("2^n", "4^n"), ("2^n", "6^n"), ("Finite(4)", "2^n")]
    z = amen.folner_search("z", 1, Fraction(1, 2))
    return {
        "free_group_paradox": {"interior": len(cert.interior), "window": len(f2),
                               "leavitt": rep.all_hold},
        "z20_hall_violation": {"left": len(hall.left), "neighbors": len(hall.neighbors)},
        "z_folner": ser.folner_to_json(z),
        "f2_folner": ser.folner_to_json(amen.folner_search("f2", 1, Fraction(1, 10),
                                                          max_radius=4)),
        "compare_towers": {f"{a} vs {b}": compare_towers(towers[a], towers[b])
                           for a, b in pairs},
    }, "report"


# --------------------------------------------------------------------------
# parser


def _add_space_args(p):
    p.add_argument("--family", help="family name (z, z2, f2, ...) or JSON family spec")
    p.add_argument("--size", "--radius", "--level", "--n", dest="size", type=int,
                   help="window size (points, side, radius or level by family)")
    p.add_argument("--space", help="Space JSON (inline or file) instead of --family/--size")


def build_parser():
    parser = argparse.ArgumentParser(prog="coarsekit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="seed for randomised estimators (default $COARSEKIT_SEED or 0)")
    common.add_argument("--out", help="write the report to this file instead of stdout")
    common.add_argument("--pretty", action="store_true", help="indented, human-readable output")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (makes output non-reproducible)")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("space", help="generate or analyse windows")
    ssub = sp.add_subparsers(dest="ssub", required=True)
    g = ssub.add_parser("gen", parents=[common])
    _add_space_args(g)
    g.set_defaults(func=cmd_space_gen)
    a = ssub.add_parser("analyze", parents=[common])
    _add_space_args(a)
    a.add_argument("--R", type=int, default=1)
    a.add_argument("--asdim-one", action="store_true")
    a.set_defaults(func=cmd_space_analyze)

    f = sub.add_parser("folner", parents=[common], help="search for Følner sets")
    f.add_argument("--family", required=True)
    f.add_argument("--R", type=int, default=1)
    f.add_argument("--eps", default="1/2")
    f.add_argument("--strategy", choices=["balls", "exhaustive"], default="balls")
    f.add_argument("--max-radius", type=int, default=6)
    f.add_argument("--max-size", type=int, default=6)
    f.set_defaults(func=cmd_folner)

    for name, func, helptext in (("paradox", cmd_paradox, "paradox certificate or Hall violation"),
                                 ("cuntz", cmd_cuntz, "Leavitt relations from a certificate")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        _add_space_args(p)
        p.add_argument("--R", type=int, default=1)
        p.add_argument("--collar", type=int, default=None)
        if name == "paradox":
            p.add_argument("--verify", help="certificate / violation / report JSON to re-check")
        p.set_defaults(func=func)

    i = sub.add_parser("ideal", parents=[common], help="1_A in the ideal generated by 1_B")
    _add_space_args(i)
    i.add_argument("--A", help="JSON list of points (default: the whole window)")
    i.add_argument("--B", required=True)
    i.add_argument("--R", type=int, default=1)
    i.set_defaults(func=cmd_ideal)

    q = sub.add_parser("qd", parents=[common], help="quasidiagonalising projection")
    _add_space_args(q)
    q.add_argument("--op", action="append")
    q.add_argument("--vector", action="append", help="[[point, value], ...]")
    q.add_argument("--eps", default="1/2")
    q.add_argument("--p", default="1")
    q.set_defaults(func=cmd_qd)

    n = sub.add_parser("norm", parents=[common], help="certified l^p operator norm interval")
    _add_space_args(n)
    n.add_argument("--op", required=True)
    n.add_argument("--p", default="2")
    n.add_argument("--starts", type=int, default=3)
    n.set_defaults(func=cmd_norm)

    m = sub.add_parser("mv", parents=[common], help="Mayer-Vietoris split and glue")
    m.add_argument("--family", required=True)
    m.add_argument("--size", type=int, required=True)
    m.add_argument("--r", type=int, default=1)
    m.add_argument("--op", required=True)
    m.add_argument("--op-b")
    m.set_defaults(func=cmd_mv)

    b = sub.add_parser("blocks", parents=[common], help="block decomposition over r-components")
    _add_space_args(b)
    b.add_argument("--op", required=True)
    b.add_argument("--r", type=int, default=1)
    b.set_defaults(func=cmd_blocks)

    k = sub.add_parser("ktheory", help="towers, supernatural numbers and K_0 classes")
    ksub = k.add_subparsers(dest="ksub", required=True)
    ks = ksub.add_parser("sn", parents=[common])
    ks.add_argument("--tower", required=True)
    kc = ksub.add_parser("compare", parents=[common])
    kc.add_argument("--t1", required=True)
    kc.add_argument("--t2", required=True)
    ke = ksub.add_parser("class-equal", parents=[common])
    ke.add_argument("--tower", required=True)
    ke.add_argument("--x", required=True)
    ke.add_argument("--y", default='{"period": [0]}')
    kp = ksub.add_parser("class-positive", parents=[common])
    kp.add_argument("--tower", required=True)
    kp.add_argument("--x", required=True)
    ko = ksub.add_parser("oracle", parents=[common])
    ko.add_argument("--tower", required=True)
    ko.add_argument("--N", type=int, default=3)
    ko.add_argument("--L", type=int, default=2)
    ko.add_argument("--x")
    for kk in (ke, kp, ko):
        kk.add_argument("--budget", type=int, default=32)
    for kk in (ks, kc, ke, kp, ko):
        kk.set_defaults(func=cmd_ktheory)

    r = sub.add_parser("report", parents=[common], help="desk-scale tour of all modules")
    r.set_defaults(func=cmd_report)
    return parser


def _inputs(args):
    skip = {"func", "out", "pretty", "timings", "command", "ssub", "ksub"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def _emit(report, args):
    text = ser.dumps(report, pretty=getattr(args, "pretty", False)) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and "seed" in vars(args):
        env = os.environ.get("COARSEKIT_SEED")
        try:
            args.seed = int(env) if env else 0
        except ValueError:
            _emit({"command": args.command, "error": {
                "type": "ValidationError", "message": "COARSEKIT_SEED: expected an integer"}}, args)
            return 1
    if getattr(args, "collar", "unset") is None:
        args.collar = args.R
    command = " ".join(x for x in (args.command, getattr(args, "ssub", None),
                                   getattr(args, "ksub", None)) if x)
    report = {"command": command, "inputs": _inputs(args)}
    t0 = time.perf_counter()
    try:
        result, verdict = args.func(args)
    except (ValidationError, PreconditionError, KeyError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        report["error"] = {"type": type(exc).__name__, "message": str(msg)}
        _emit(report, args)
        return 1
    except (IdentityFailure, InvariantViolation, AssertionError) as exc:
        report["error"] = {"type": type(exc).__name__, "message": str(exc)}
        _emit(report, args)
        return 2
    report["verdict"] = verdict
    report["result"] = result
    if args.timings:
        report["timings"] = {"seconds": round(time.perf_counter() - t0, 6)}
    _emit(report, args)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
