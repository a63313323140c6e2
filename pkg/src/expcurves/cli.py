"""Command line front end: JSON in (file or stdin), JSON out (stdout).

Exit codes: 0 success, 1 input error, 2 partial result.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .errors import ExpCurvesError, InputError, PartialResultError
from .exact_numerics import AlgebraicNumber, ComplexBall
from .exact_numerics.serialize import (
    box_from_json,
    number_from_json,
    number_to_json,
    poly_from_json,
    rational_to_json,
)

DIGITS_TO_BITS = 3.3219280948873626


def _load(path):
    try:
        if path in (None, "-"):
            text = sys.stdin.read()
        else:
            with open(path) as fh:
                text = fh.read()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read JSON input: {exc}") from exc


def _is_decimal(s):
    return isinstance(s, str) and any(ch in s for ch in ".eE") and "/" not in s


def parse_value(obj, digits=None):
    """Exact number, or a ball for decimal strings (with ``digits`` of accuracy)."""
    if isinstance(obj, float):
        obj = repr(obj)
    if isinstance(obj, list) and len(obj) == 2:
        re, im = str(obj[0]), str(obj[1])
        return _ball(re, im, digits)
    if _is_decimal(obj):
        return _ball(obj, "0", digits)
    if isinstance(obj, dict) and ("re" in obj or "value" in obj):
        if "value" in obj:
            return parse_value(obj["value"], obj.get("precision", digits))
        return _ball(str(obj["re"]), str(obj.get("im", "0")), obj.get("precision", digits))
    return number_from_json(obj)


def _decimals(s):
    s = s.lower().split("e")[0]
    return len(s.split(".")[1]) if "." in s else 0


def _ball(re, im, digits):
    # never claim more accuracy than the digits actually given
    present = min(_decimals(re), _decimals(im) if im != "0" else _decimals(re))
    digits = present if digits is None else min(int(digits), present)
    prec = int(digits * DIGITS_TO_BITS) + 8
    return ComplexBall.from_decimal(re, im, prec, rad=f"1e-{int(digits)}")


def _int(obj, key, default=None):
    if key not in obj:
        if default is None:
            raise InputError(f"missing field {key!r}")
        return default
    try:
        return int(obj[key])
    except (TypeError, ValueError) as exc:
        raise InputError(f"field {key!r} must be an integer") from exc


# subcommands


def cmd_zeros(obj):
    from .zero_finder import Box, ZeroFinderConfig, isolate_zeros

    p = poly_from_json(obj["poly"])
    box = Box(*box_from_json(obj["box"]))
    cfg = ZeroFinderConfig(target_bits=_int(obj, "target_bits", 256))
    if "working_bits" in obj:
        cfg.working_bits = int(obj["working_bits"])
    zeros = isolate_zeros(p, box, cfg)
    out = []
    for z in zeros:
        entry = z.approx.to_json()
        entry["multiplicity"] = z.multiplicity
        entry["residual_bound"] = str(z.residual_bound)
        entry["box"] = [rational_to_json(c) for c in z.box.to_list()]
        out.append(entry)
    return out


def cmd_algdep(obj):
    from .relations import algdep

    v = parse_value(obj["value"], obj.get("precision"))
    rel = algdep(v, _int(obj, "max_degree"), _int(obj, "max_height"))
    return {"coefficients": list(rel) if rel is not None else None, "order": "low-to-high"}


def cmd_mulrel(obj):
    from .relations import mul_relation_lattice

    nums = [parse_value(x, obj.get("precision")) for x in obj["numbers"]]
    lat = mul_relation_lattice(nums, _int(obj, "max_exponent", 200))
    return lat.to_json()


def cmd_dzbound(obj):
    from .rou_sums import dz_admissible, dz_order_bound

    k, delta = _int(obj, "k"), _int(obj, "delta", 1)
    bound = dz_order_bound(k, delta)
    out = {"k": k, "delta": delta, "bound": bound}
    if obj.get("list_admissible"):
        out["admissible"] = [q for q in range(1, bound + 1) if dz_admissible(q, k, delta)]
    return out


def _rou_sum_json(s):
    return {"order": s.order, "terms": [{"coeff": number_to_json(c), "exp": e} for c, e in s.terms]}


def cmd_unitsum_enum(obj):
    from .rou_sums import enumerate_vanishing_sums

    coeffs = [number_from_json(c) for c in obj.get("coefficients", [1, -1])]
    sums = enumerate_vanishing_sums(
        _int(obj, "k"),
        _int(obj, "q_max"),
        coefficients=coeffs,
        q_min=_int(obj, "q_min", 1),
        up_to_symmetry=bool(obj.get("up_to_symmetry", False)),
    )
    return {"count": len(sums), "sums": [_rou_sum_json(s) for s in sums]}


def cmd_laurent(obj):
    from .expdioph import DEFAULT_N, ExpDiophInstance, norm_bound, solve_bounded

    bases = [[number_from_json(a) for a in row] for row in obj["bases"]]
    polys = []
    for p in obj["q_polys"]:
        if isinstance(p, list):
            # explicit terms [{"exp": [...], "coeff": ...}, ...]
            polys.append([(tuple(term["exp"]), number_from_json(term["coeff"])) for term in p])
        elif isinstance(p, dict):
            polys.append(number_from_json(p))
        else:
            polys.append(p)
    inst = ExpDiophInstance(polys, bases)
    if "N" in obj:
        n, source = _int(obj, "N"), "input"
    elif "delta" in obj and "eta" in obj:
        n, source = norm_bound(float(obj["delta"]), float(obj["eta"])), "norm_bound"
    else:
        n, source = _int(obj, "default_N", DEFAULT_N), "default"
    sols = solve_bounded(
        inst,
        n,
        max_lattice_points=_int(obj, "max_lattice_points", 2_000_000),
        check_h=bool(obj.get("check_h", True)),
    )
    return {
        "N": n,
        "N_source": source,
        "solutions": [{"m": list(m), "degenerate_subsets": [list(s) for s in subs]} for m, subs in sols],
    }


def cmd_uniteq(obj):
    from .expdioph import FinRankMulGroup, UnitEquationInstance, solve_unit_equation

    grp_obj = obj.get("group", {})
    torsion = grp_obj.get("torsion_order", 1)
    group = FinRankMulGroup(
        None if torsion in (None, "all") else int(torsion),
        tuple(number_from_json(d) for d in grp_obj.get("free_generators", [])),
    )
    inst = UnitEquationInstance([number_from_json(x) for x in obj["lambdas"]], group)
    kwargs = {}
    if "torsion_cap" in obj:
        kwargs["max_points"] = int(obj["torsion_cap"])
    sols = solve_unit_equation(inst, _int(obj, "exponent_bound", 0), delta=obj.get("delta"), **kwargs)
    return {"solutions": [[g.to_json() for g in sol] for sol in sols]}


def cmd_specialize(obj):
    from .specialize import AlgebraPresentation, build_injective_on_group, build_specializations, det, image_matrix

    pres = AlgebraPresentation(
        obj.get("generators", []),
        {k: number_from_json(v) for k, v in obj.get("constants", {}).items()},
        tuple(obj.get("inverted", [])),
    )
    b = obj["elements"]
    budget = _int(obj, "budget", 20000)
    if obj.get("group_generators"):
        maps, kept = build_injective_on_group(
            pres, obj["group_generators"], b, budget, _int(obj, "max_exponent", 200)
        )
    else:
        maps, kept = build_specializations(pres, b, budget)
    d = det(image_matrix(pres, maps, b, kept))
    return {
        "kept": kept,
        "maps": [m.to_json() for m in maps],
        "determinant": number_to_json(d),
    }


def cmd_kzeros(obj):
    from .pipeline import ExpFieldData, PipelineConfig, kzeros

    data = ExpFieldData.from_json(obj)
    return kzeros(data, PipelineConfig.from_json(obj.get("caps")))


def cmd_independence(obj):
    from .pipeline import independence_report

    p = poly_from_json(obj["poly"])
    return independence_report(
        p,
        box_from_json(obj["box"]),
        _int(obj, "max_degree", 3),
        _int(obj, "max_height", 10**4),
        _int(obj, "precision_bits", 256),
        max_zeros=obj.get("max_zeros"),
        triple_degree=_int(obj, "triple_degree", 1),
    )


COMMANDS = {
    "zeros": (cmd_zeros, "isolate and refine zeros of p(z, e^z) in a box"),
    "algdep": (cmd_algdep, "find an integer polynomial vanishing at a number"),
    "mulrel": (cmd_mulrel, "lattice of multiplicative relations"),
    "dzbound": (cmd_dzbound, "root of unity order bound for vanishing sums"),
    "unitsum-enum": (cmd_unitsum_enum, "enumerate nondegenerate vanishing root of unity sums"),
    "laurent": (cmd_laurent, "bounded exponential-Diophantine search"),
    "uniteq": (cmd_uniteq, "unit equation in a finite rank group"),
    "specialize": (cmd_specialize, "specializations with an invertible image matrix"),
    "kzeros": (cmd_kzeros, "candidate zeros in a field with declared logarithms"),
    "independence": (cmd_independence, "relation search among computed zeros"),
}


def _default(o):
    if isinstance(o, Fraction):
        return rational_to_json(o)
    if isinstance(o, AlgebraicNumber):
        return number_to_json(o)
    return str(o)


def build_parser():
    parser = argparse.ArgumentParser(prog="expcurves", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("input", nargs="?", default="-", help="JSON file (default: stdin)")
        sp.add_argument("--indent", type=int, default=2)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    func = COMMANDS[args.command][0]
    try:
        obj = _load(args.input)
        if not isinstance(obj, dict):
            raise InputError("input must be a JSON object")
        result = func(obj)
    except PartialResultError as exc:
        json.dump({"error": str(exc), "partial": exc.partial}, sys.stdout, indent=args.indent, default=_default)
        sys.stdout.write("\n")
        return 2
    except (ExpCurvesError, KeyError, TypeError, ValueError) as exc:
        kind = type(exc).__name__
        json.dump({"error": str(exc), "kind": kind}, sys.stdout, indent=args.indent)
        sys.stdout.write("\n")
        return 1
    json.dump(result, sys.stdout, indent=args.indent, default=_default)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
