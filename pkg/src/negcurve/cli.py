"""Command-line front end with canonical, deterministic JSON output.

Every verb prints exactly one canonical JSON document (sorted keys,
compact separators) so identical invocations are byte-identical.  Exit
codes: 0 for any computed answer (including "not isomorphic"), 1 for
malformed input, 2 for an internal consistency violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .extensions import ExtClass, ModuliParams, reduce_cocycle, restrict_level
from .groupoid import (GroupElem, act, induced_inverse, induced_product,
                       verify_groupoid)
from .homspaces import brute_force_hom, hom_ext_dims, isom_decide
from .ring import ConsistencyError, RingElem, RingParams, elem_from_dict, elem_to_dict
from .sections import cone_check, h0_basis, h1_dim


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(1, f"{self.prog}: error: {message}\n")


def _dump(obj, stream) -> None:
    stream.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")


def _parse_rational(value) -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ValueError(f"coefficients must be exact (int or 'n/d'), got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ValueError(f"cannot parse rational from {value!r}")


def _moduli_params(args) -> ModuliParams:
    if args.m is None and args.level is None:
        raise ValueError("one of --m or --level is required")
    if args.m is not None and args.level is not None:
        raise ValueError("--m and --level are mutually exclusive")
    m = args.m if args.m is not None else args.level + 1
    return ModuliParams(RingParams(args.k, m), args.j)


def _load_payload(args) -> dict:
    if args.payload in (None, "-"):
        text = sys.stdin.read()
    else:
        with open(args.payload, "r", encoding="utf-8") as fh:
            text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"payload is not valid JSON: {exc}") from exc


def _ext_class(data, params: ModuliParams) -> ExtClass:
    """Accept either the full envelope or a coefficient vector in basis order."""
    if isinstance(data, list):
        return ExtClass.from_vector(params, [_parse_rational(v) for v in data])
    if isinstance(data, dict):
        cls = ExtClass.from_dict(data)
        if cls.params != params:
            raise ValueError("payload parameters disagree with the flags")
        return cls
    raise ValueError("extension class must be a JSON object or coefficient list")


def _group_elem(data, params: ModuliParams) -> GroupElem:
    if not isinstance(data, dict):
        raise ValueError("group element must be a JSON object")
    return GroupElem.from_dict(data, params)


def _require_fields(data: dict, fields: set[str]):
    if not isinstance(data, dict):
        raise ValueError("payload must be a JSON object")
    extra = set(data) - fields
    if extra:
        raise ValueError(f"unknown fields: {sorted(extra)}")
    missing = fields - set(data)
    if missing:
        raise ValueError(f"missing fields: {sorted(missing)}")


def _cmd_basis(args, out):
    from .extensions import basis_W

    params = _moduli_params(args)
    basis = basis_W(params)
    _dump({"dim": len(basis), "indices": [[i, l] for (i, l) in basis]}, out)


def _cmd_reduce(args, out):
    params = _moduli_params(args)
    data = _load_payload(args)
    _require_fields(data, {"y"})
    y = elem_from_dict(data["y"])
    if y.params != params.ring:
        raise ValueError("payload parameters disagree with the flags")
    p, f_u, f_v = reduce_cocycle(y, params)
    _dump({"p": p.to_dict(), "f_U": elem_to_dict(f_u), "f_V": elem_to_dict(f_v)}, out)


def _cmd_act(args, out):
    params = _moduli_params(args)
    data = _load_payload(args)
    _require_fields(data, {"g", "p"})
    result = act(_group_elem(data["g"], params), _ext_class(data["p"], params))
    _dump(result.to_dict(), out)


def _cmd_compose(args, out):
    params = _moduli_params(args)
    data = _load_payload(args)
    _require_fields(data, {"g1", "g2", "p"})
    result = induced_product(_group_elem(data["g1"], params),
                             _group_elem(data["g2"], params),
                             _ext_class(data["p"], params))
    _dump(result.to_dict(), out)


def _cmd_invert_g(args, out):
    params = _moduli_params(args)
    data = _load_payload(args)
    _require_fields(data, {"g", "p"})
    result = induced_inverse(_group_elem(data["g"], params),
                             _ext_class(data["p"], params))
    _dump(result.to_dict(), out)


def _cmd_isom(args, out):
    params = _moduli_params(args)
    data = _load_payload(args)
    _require_fields(data, {"p", "p_prime"})
    witness = isom_decide(_ext_class(data["p"], params),
                          _ext_class(data["p_prime"], params))
    _dump({"isomorphic": witness is not None,
           "witness": None if witness is None else witness.to_dict()}, out)


def _cmd_dims(args, out):
    params = _moduli_params(args)
    data = _load_payload(args)
    _require_fields(data, {"p", "p_prime"})
    profile = hom_ext_dims(_ext_class(data["p"], params),
                           _ext_class(data["p_prime"], params))
    _dump(profile.to_dict(), out)


def _cmd_bruteforce(args, out):
    params = _moduli_params(args)
    data = _load_payload(args)
    _require_fields(data, {"p", "p_prime"})
    p = _ext_class(data["p"], params)
    p_prime = _ext_class(data["p_prime"], params)
    dim, _ = brute_force_hom(p, p_prime, args.degree)
    profile = hom_ext_dims(p, p_prime)
    if profile.dim_hom != dim:
        raise ConsistencyError(
            f"oracle mismatch: brute force {dim} vs filtration {profile.dim_hom}")
    from .homspaces import default_degree_bound

    degree = args.degree if args.degree is not None else default_degree_bound(params)
    _dump({"degree": degree, "dim": dim, "stabilized": True}, out)


def _cmd_check_axioms(args, out):
    params = _moduli_params(args)
    report = verify_groupoid(params, args.samples, args.seed,
                             truncation_samples=args.truncation_samples)
    _dump(report, out)


def _cmd_cohomology(args, out):
    params = RingParams(args.k, args.m if args.m is not None else args.level + 1)
    basis = h0_basis(args.s, params)
    _dump({"s": args.s, "h0_dim": len(basis), "h0_basis": [[l, i] for (l, i) in basis],
           "h1_dim": h1_dim(args.s, params)}, out)


def _cmd_cone_check(args, out):
    m = args.m if args.m is not None else args.level + 1
    _dump(cone_check(args.k, m), out)


def _cmd_restrict(args, out):
    params = _moduli_params(args)
    data = _load_payload(args)
    _require_fields(data, {"p"})
    p = _ext_class(data["p"], params)
    _dump(restrict_level(p, args.to).to_dict(), out)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="negcurve", description=__doc__)
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def add(name, fn, needs_j=True, payload=False, extra=()):
        sp = sub.add_parser(name)
        sp.add_argument("--k", type=int, required=True)
        if needs_j:
            sp.add_argument("--j", type=int, required=True)
        sp.add_argument("--m", type=int)
        sp.add_argument("--level", type=int,
                        help="neighborhood order n; equivalent to --m n+1")
        sp.add_argument("--output", default=None)
        if payload:
            sp.add_argument("payload", nargs="?", default=None,
                            help="JSON file, or '-'/omitted for stdin")
        for name_, kwargs in extra:
            sp.add_argument(name_, **kwargs)
        sp.set_defaults(fn=fn)
        return sp

    add("basis", _cmd_basis)
    add("reduce", _cmd_reduce, payload=True)
    add("act", _cmd_act, payload=True)
    add("compose", _cmd_compose, payload=True)
    add("invert-g", _cmd_invert_g, payload=True)
    add("isom", _cmd_isom, payload=True)
    add("dims", _cmd_dims, payload=True)
    add("bruteforce", _cmd_bruteforce, payload=True,
        extra=[("--degree", {"type": int, "default": None})])
    add("check-axioms", _cmd_check_axioms,
        extra=[("--samples", {"type": int, "default": 100}),
               ("--seed", {"type": int, "default": 0}),
               ("--truncation-samples", {"type": int, "default": 0})])
    add("cohomology", _cmd_cohomology, needs_j=False,
        extra=[("--s", {"type": int, "required": True})])
    add("cone-check", _cmd_cone_check, needs_j=False)
    add("restrict", _cmd_restrict, payload=True,
        extra=[("--to", {"type": int, "required": True})])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as out:
                args.fn(args, out)
        else:
            args.fn(args, sys.stdout)
    except ConsistencyError as exc:
        print(f"negcurve: internal consistency violation: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"negcurve: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
