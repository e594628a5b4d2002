"""Command-line interface.

    annulus-ops classify FILE... --r R
    annulus-ops decompose {unitary,wold,canonical,levan} FILE --r R
    annulus-ops family {canonical,wold,unitary,levan,burdak} FILE... --r R
    annulus-ops gen {ar-unitary,cyclic,hardy,sarason,planted} --r R [--out DIR]
    annulus-ops brehmer FILE... --r R [--max-k K]

Matrix files are JSON ``{"dim": N, "data": [[re, im], ...]}`` in row-major
order. Reports go to stdout (or ``--out``) as JSON with floats written to 17
significant digits.

Exit codes: 0 on success, 1 for a structured error (the report then holds
``{"error": {"code", "message"}}``), 2 for usage errors, 3 when ``--strict``
is given and an in-band verdict failed.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import brehmer, classify, decompose, family, models
from .errors import (
    AnnulusError,
    DimensionMismatch,
    ExplicitCapError,
    MixedType,
    NotCommuting,
    ParseError,
    SingularOperator,
)
from .linops import AnnulusParams

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_VERDICT = 3


# ---------------------------------------------------------------- serialization


def _fmt_float(x):
    if math.isnan(x) or math.isinf(x):
        return json.dumps(str(x))
    text = format(x, ".17g")
    # keep floats recognizable as floats after a round trip
    if not any(ch in text for ch in ".en"):
        text += ".0"
    return text


def dumps(obj, indent=2, _level=0):
    """Deterministic JSON with 17-significant-digit floats."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)) or obj is None:
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # short numeric pairs stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, (bool, np.bool_)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    return {"dim": int(M.shape[0]), "data": [[float(z.real), float(z.imag)] for z in M.ravel()]}


def _encode_frame(B):
    return {
        "rows": int(B.shape[0]),
        "cols": int(B.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in np.asarray(B).ravel()],
    }


def decode_matrix(obj, source="<input>"):
    """Parse a matrix-file object, raising ParseError on any schema violation."""
    if not isinstance(obj, dict) or "dim" not in obj or "data" not in obj:
        raise ParseError(f"{source}: expected an object with 'dim' and 'data'")
    dim, data = obj["dim"], obj["data"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ParseError(f"{source}: 'dim' must be a positive integer")
    if not isinstance(data, list) or len(data) != dim * dim:
        raise ParseError(f"{source}: 'data' must hold exactly dim^2 = {dim * dim} entries")
    values = []
    for entry in data:
        if (
            not isinstance(entry, list)
            or len(entry) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in entry)
        ):
            raise ParseError(f"{source}: every entry must be a [re, im] pair of numbers")
        values.append(complex(entry[0], entry[1]))
    M = np.array(values, dtype=complex).reshape(dim, dim)
    if not np.all(np.isfinite(M)):
        raise ParseError(f"{source}: non-finite entry")
    return M


def read_matrix(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read file: {exc.strerror}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON: {exc.msg} (line {exc.lineno})") from None
    return decode_matrix(obj, str(path))


def read_tuple(paths):
    mats = [read_matrix(path) for path in paths]
    if len({M.shape[0] for M in mats}) > 1:
        raise DimensionMismatch("input matrices have different dimensions")
    return mats


def _key(label):
    return ",".join(label) if isinstance(label, tuple) else str(label)


def _subset_label(u):
    return [i + 1 for i in u]


# ---------------------------------------------------------------- commands


def _params(args):
    return AnnulusParams.from_profile(
        args.r, tol_rank=args.tol_rank, tol_id=args.tol_id, tol_spec=args.tol_spec
    )


def _header(args, p):
    return {
        "command": args.command_echo,
        "r": p.r,
        "tolerances": {"tol_rank": p.tol_rank, "tol_id": p.tol_id, "tol_spec": p.tol_spec},
    }


def classify_matrix(T, p):
    out = {
        "dim": int(T.shape[0]),
        "contraction": classify.is_contraction(T, p.tol_id),
        "normal": classify.is_normal(T, p.tol_id),
        "invertible": classify.is_invertible(T, p.tol_rank),
        "ar_unitary": classify.is_ar_unitary(T, p),
        "ar_unitary_defect": classify.ar_unitary_defect(T, p.r),
    }
    try:
        out["ar_isometry"] = classify.is_ar_isometry(T, p)
    except SingularOperator:
        out["ar_isometry"] = False
    out["candidate"] = classify.is_ar_contraction_candidate(T, p)
    out["atom"] = classify.classify_atom(T, p).value if out["candidate"] else None
    out["unitary_type"] = None
    if out["ar_unitary"]:
        try:
            out["unitary_type"] = classify.classify_unitary_type(T, p).value
        except MixedType:
            out["unitary_type"] = "mixed"
    out["cnu_type"] = classify.classify_cnu(T, p).value if out["atom"] == "t_c" else None
    eig = np.sort_complex(np.linalg.eigvals(T))
    out["eigenvalues"] = [[float(z.real), float(z.imag)] for z in eig]
    return out


def cmd_classify(args):
    p = _params(args)
    mats = [read_matrix(path) for path in args.files]
    report = _header(args, p)
    report["matrices"] = [
        {"file": str(path), **classify_matrix(T, p)} for path, T in zip(args.files, mats)
    ]
    return report


_SPLITS = {
    "unitary": decompose.split_ar_unitary,
    "wold": decompose.wold_ar_isometry,
    "canonical": decompose.canonical_ar_contraction,
    "levan": decompose.levan_split,
}


def cmd_decompose(args):
    p = _params(args)
    T = read_matrix(args.file)
    split = _SPLITS[args.kind](T, p)
    report = _header(args, p)
    report["kind"] = args.kind
    report["parts"] = [
        {
            "label": name,
            "dim": space.dim,
            "basis": _encode_frame(space.basis),
            "reduction_residual": split.residuals[name],
        }
        for name, space in split.parts
    ]
    report["identity_residuals"] = dict(split.identity_residuals)
    report["orthogonality"] = split.orthogonality
    report["notes"] = list(split.notes)
    return report


_FAMILIES = {
    "canonical": family.canonical_family,
    "wold": family.wold_family,
    "unitary": family.unitary_family,
    "levan": family.levan_family,
    "burdak": family.burdak_family,
}


def _plain(value):
    if isinstance(value, dict):
        return {_key(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def cmd_family(args):
    p = _params(args)
    if len(args.files) < 2:
        raise DimensionMismatch("family commands need at least two matrix files")
    if len(args.files) > family.MAX_TUPLE:
        raise ExplicitCapError(
            f"tuples longer than {family.MAX_TUPLE} are not supported (got {len(args.files)})"
        )
    mats = read_tuple(args.files)
    rep = _FAMILIES[args.kind](mats, p)
    residuals = rep.diagnostics["joint_reduction_residuals"]
    report = _header(args, p)
    report["kind"] = args.kind
    report["parts"] = [
        {
            "labels": list(key),
            "dim": space.dim,
            "basis": _encode_frame(space.basis),
            "reduction_residuals": residuals[key],
        }
        for key, space in rep.parts
    ]
    if rep.remainder is not None:
        space, tag = rep.remainder
        report["remainder"] = {
            "tag": tag,
            "dim": space.dim,
            "basis": _encode_frame(space.basis),
            "reduction_residuals": residuals[tag],
        }
    extra = {k: v for k, v in rep.diagnostics.items() if k != "joint_reduction_residuals"}
    report["diagnostics"] = _plain(extra)
    for flag in ("pure_parts_empty", "strongly_cnu_verified"):
        if flag in extra:
            report["passed"] = bool(extra[flag])
    return report


def cmd_brehmer(args):
    p = _params(args)
    mats = read_tuple(args.files)
    if not family.is_commuting(mats, p.tol_id):
        raise NotCommuting("tuple is not commuting")
    rep = brehmer.check_brehmer(mats, p)
    report = _header(args, p)
    report["subsets"] = [
        {"subset": _subset_label(u), "min_eigenvalue": v, "pass": v >= -p.tol_id}
        for u, v in rep.min_eigenvalues.items()
    ]
    passed = rep.passed
    if args.max_k > 0:
        try:
            isometries = all(classify.is_ar_isometry(V, p) for V in mats)
        except SingularOperator:
            isometries = False
        section = {"applicable": isometries}
        if isometries:
            rows = []
            for u in brehmer.subsets(len(mats)):
                for k in itertools.product(range(1, args.max_k + 1), repeat=len(u)):
                    res = brehmer.check_bp_identity(mats, u, k, p)
                    rows.append({"subset": _subset_label(u), "k": list(k), "residual": res})
                    passed = passed and res <= p.tol_id
            section["residuals"] = rows
        else:
            section["reason"] = "not every component is an annulus isometry"
        report["bp_identity"] = section
    report["passed"] = passed
    return report


def _unitary_type(n_unit, n_r):
    if n_unit and n_r:
        return "mixed"
    return "u" if n_unit else "r"


def _expected_labels(model, args):
    """Classify labels implied by the construction of a generated model."""
    if model in ("ar-unitary", "cyclic"):
        n_unit, n_r = (args.n_unit, args.n_r) if model == "ar-unitary" else (args.N, args.M)
        return {"ar_unitary": True, "candidate": True, "atom": "t_u",
                "unitary_type": _unitary_type(n_unit, n_r), "cnu_type": None}
    if model in ("hardy", "sarason"):
        # the truncated shift kills its last basis vector; the closed one is a
        # weighted cyclic shift with all weights strictly inside (r, 1)
        if not args.closed:
            return {"ar_unitary": False, "candidate": False, "atom": None,
                    "unitary_type": None, "cnu_type": None}
        return {"ar_unitary": False, "candidate": True, "atom": "t_c",
                "unitary_type": None, "cnu_type": "t_cni"}
    if args.n_c == 0:
        return {"ar_unitary": True, "candidate": True, "atom": "t_u",
                "unitary_type": _unitary_type(args.n_unit, args.n_r), "cnu_type": None}
    if args.n_unit + args.n_r == 0:
        return {"ar_unitary": False, "candidate": True, "atom": "t_c",
                "unitary_type": None, "cnu_type": "t_cni"}
    return {"ar_unitary": False, "candidate": True, "atom": "non_atom",
            "unitary_type": None, "cnu_type": None}


def cmd_gen(args):
    p = _params(args)
    out = Path(args.out or ".")
    name = args.model.replace("-", "_")
    meta = {"model": args.model, "r": p.r, "seed": args.seed}
    classify_p = p
    if args.model == "ar-unitary":
        mats = [models.random_ar_unitary(args.n_unit, args.n_r, p.r, seed=args.seed)]
        meta["params"] = {"n_unit": args.n_unit, "n_r": args.n_r}
        meta["expected_dims"] = {"u": args.n_unit, "r": args.n_r}
    elif args.model == "cyclic":
        mats = [models.gen_cyclic_annulus_unitary(args.N, args.M, p)]
        meta["params"] = {"N": args.N, "M": args.M}
        meta["expected_dims"] = {"u": args.N, "r": args.M}
    elif args.model in ("hardy", "sarason"):
        spec = models.HardyModelSpec(args.alpha, p.r, args.window[0], args.window[1])
        V, c = models.gen_hardy_shift(spec, closed=args.closed)
        meta["params"] = {"alpha": args.alpha, "window": list(args.window), "closed": args.closed}
        meta["indices"] = [int(i) for i in spec.indices]
        meta["weights"] = [float(x) for x in c]
        if args.model == "hardy":
            mats = [V]
        else:
            V1, V2, r2 = models.gen_sarason_pair(spec, closed=args.closed)
            mats = [V1, V2]
            meta["r_squared"] = r2
            classify_p = p.with_r(r2)
    else:
        blocks = []
        rng = np.random.default_rng(args.seed)
        if args.n_unit:
            blocks.append((models.random_ar_unitary(args.n_unit, 0, p.r, rng, conjugate=False), "u"))
        if args.n_r:
            blocks.append((models.random_ar_unitary(0, args.n_r, p.r, rng, conjugate=False), "r"))
        if args.n_c:
            blocks.append((models.random_cnu(args.n_c, p.r, rng), "c"))
        if not blocks:
            raise ValueError("planted model needs at least one nonzero block size")
        ops, _ = models.gen_planted(models.PlantedSpec(blocks, seed=args.seed))
        mats = ops
        meta["params"] = {"n_unit": args.n_unit, "n_r": args.n_r, "n_c": args.n_c}
        meta["expected_dims"] = {"u": args.n_unit, "r": args.n_r, "c": args.n_c}

    if len(mats) == 1:
        names = [f"{name}.json"]
    else:
        names = [f"{name}_{i + 1}.json" for i in range(len(mats))]
    meta["files"] = names
    meta["classify_r"] = classify_p.r
    meta["expected_classify"] = {fname: _expected_labels(args.model, args) for fname in names}

    out.mkdir(parents=True, exist_ok=True)
    for fname, M in zip(names, mats):
        (out / fname).write_text(dumps(encode_matrix(M)) + "\n")
    meta_name = f"{name}.meta.json"
    (out / meta_name).write_text(dumps(meta) + "\n")

    report = _header(args, p)
    report["written"] = [str(out / fname) for fname in names + [meta_name]]
    return report


# ---------------------------------------------------------------- parser


def _common(parser, needs_out_file=True):
    parser.add_argument("--r", type=float, required=True, help="annulus inner radius, 0 < r < 1")
    parser.add_argument("--tol-rank", type=float, default=None)
    parser.add_argument("--tol-id", type=float, default=None)
    parser.add_argument("--tol-spec", type=float, default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--out", default=None, help="report path" if needs_out_file else "output directory"
    )
    parser.add_argument("--strict", action="store_true", help="exit 3 when a verdict fails")


def build_parser():
    parser = argparse.ArgumentParser(prog="annulus-ops", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="predicates and atom labels for each matrix")
    c.add_argument("files", nargs="+")
    _common(c)
    c.set_defaults(func=cmd_classify)

    d = sub.add_parser("decompose", help="single-operator decompositions")
    d.add_argument("kind", choices=sorted(_SPLITS))
    d.add_argument("file")
    _common(d)
    d.set_defaults(func=cmd_decompose)

    f = sub.add_parser("family", help="joint decompositions of a tuple")
    f.add_argument("kind", choices=sorted(_FAMILIES))
    f.add_argument("files", nargs="+")
    _common(f)
    f.set_defaults(func=cmd_family)

    g = sub.add_parser("gen", help="write model operators as matrix files")
    g.add_argument("model", choices=["ar-unitary", "cyclic", "hardy", "sarason", "planted"])
    g.add_argument("--n-unit", type=int, default=2)
    g.add_argument("--n-r", type=int, default=2)
    g.add_argument("--n-c", type=int, default=2)
    g.add_argument("--N", type=int, default=3)
    g.add_argument("--M", type=int, default=2)
    g.add_argument("--alpha", type=float, default=0.0)
    g.add_argument("--window", type=int, nargs=2, default=[-5, 5], metavar=("N_MIN", "N_MAX"))
    g.add_argument("--closed", action="store_true", help="wrap the last basis vector around")
    _common(g, needs_out_file=False)
    g.set_defaults(func=cmd_gen)

    b = sub.add_parser("brehmer", help="Brehmer positivity and binomial-sum identities")
    b.add_argument("files", nargs="+")
    b.add_argument("--max-k", type=int, default=2)
    _common(b)
    b.set_defaults(func=cmd_brehmer)
    return parser


def _emit(report, args):
    text = dumps(report) + "\n"
    if args.out and args.command != "gen":
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.command_echo = argv
    try:
        report = args.func(args)
    except AnnulusError as exc:
        code, message = type(exc).__name__, str(exc)
    except OSError as exc:
        code, message = "IoError", str(exc)
    except ValueError as exc:
        code, message = "InvalidParameter", str(exc)
    else:
        _emit(report, args)
        if args.strict and report.get("passed") is False:
            return EXIT_VERDICT
        return EXIT_OK
    sys.stdout.write(dumps({"command": argv, "error": {"code": code, "message": message}}) + "\n")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
