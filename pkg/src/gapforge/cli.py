"""Command-line front end: ``gapforge reduce | verify | gadget | experiment``.

Exit codes: 0 ok, 1 verification failed, 2 usage or parse error,
3 enumeration budget exceeded, 4 gadget certification failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import gadget as gd
from .budget import BudgetExceeded
from .circuit import CircuitSyntaxError, QuadSystem, circuit_to_quad, find_satisfying_assignment, parse_circuit
from .codes import eps_balanced_code, hadamard_code, min_distance_exhaustive
from .field import REAL, make_field
from .oracle import ncp_solve_bruteforce, sparsest_codeword_fq, sparsest_in_kernel_real, svp_norm_check
from .reduce import (
    MdpInstance,
    NcpInstance,
    RealInstance,
    ReductionError,
    SvpInstance,
    digest,
    dumps,
    instance_from_dict,
    mdp_to_ncp,
    planted_in_subspace,
    quad_to_mdp,
    quad_to_mdp_distinguished,
    quad_to_real_mdp,
    real_to_svp,
    tensor_instance,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET, EXIT_CERT = 0, 1, 2, 3, 4


class UsageError(Exception):
    pass


class CertError(Exception):
    pass


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _parse_field(text: str):
    if text.lower() in ("real", "r", "q"):
        return REAL
    if "^" in text:
        p, m = text.split("^")
        return make_field(int(p), int(m))
    return make_field(int(text))


def _parse_opts(spec: str) -> tuple[str, dict]:
    name, _, rest = spec.partition(":")
    opts = {}
    for part in filter(None, rest.split(",")):
        if "=" in part:
            k, v = part.split("=", 1)
            opts[k.strip()] = v.strip()
        else:
            opts[part.strip()] = ""
    return name.strip(), opts


def _load_system(path: str, field, homogeneous: bool) -> QuadSystem:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return QuadSystem.from_dict(json.loads(text))
    circ = parse_circuit(text)
    sat = find_satisfying_assignment(circ)
    return circuit_to_quad(circ, field, homogeneous=homogeneous, assignment=sat)


def _code_gadget(spec: str, F, budget):
    name, opts = _parse_opts(spec)
    if name == "hadamard":
        return hadamard_code(F, int(opts.get("m", 2))), spec
    if name == "eps":
        code = eps_balanced_code(F, int(opts["n"]), Fraction(opts.get("eps", "1/2")))
        min_distance_exhaustive(code, budget)
        return code, spec
    raise UsageError(f"gadget {spec!r} is not a code gadget")


def _real_gadget(spec: str, seed, C2):
    name, opts = _parse_opts(spec)
    if name == "fixture":
        key = opts and next(iter(opts)) or "handcrafted"
        if key not in gd.FIXTURES:
            raise UsageError(f"unknown fixture {key!r}")
        return gd.FIXTURES[key]()
    if name == "rademacher":
        if seed is None:
            raise UsageError("--seed is required for sampled gadgets")
        return gd.sample_gadget(int(opts.get("n", 1)), Fraction(opts.get("eps", "1/2")), seed, C2)
    raise UsageError(f"gadget {spec!r} is not a real gadget")


def cmd_reduce(args) -> int:
    real = args.target in ("real", "svp")
    field = REAL if real else _parse_field(args.field)
    if args.target == "ncp" and not args.distinguished:
        raise UsageError("--target ncp needs the distinguished pipeline (--distinguished)")
    sys_ = _load_system(args.source, field, homogeneous=True)
    if real:
        gadget = _real_gadget(args.gadget, args.seed, args.C2)
        cert = gd.certify_gadget(gadget, budget=args.budget)
        if args.require_cert and not (cert.complete and cert.wld_verified):
            raise CertError(f"gadget certification failed: {cert.to_dict()}")
        inst = quad_to_real_mdp(sys_, gadget, cert, budget=args.budget)
        inst = tensor_instance(inst, args.tensor)
        if args.target == "svp":
            inst = real_to_svp(inst, args.p)
    else:
        code, name = _code_gadget(args.gadget, field, args.budget)
        if args.require_cert and code.meta.d is None:
            raise CertError("code distance not certified")
        build = quad_to_mdp_distinguished if args.distinguished else quad_to_mdp
        inst = tensor_instance(build(sys_, code, name), args.tensor, args.budget)
        if args.target == "ncp":
            inst = mdp_to_ncp(inst)
    _write(dumps(inst), args.out)
    return EXIT_OK


def _oracle(inst, budget, bound=None):
    if isinstance(inst, MdpInstance):
        return sparsest_codeword_fq(inst, budget)
    if isinstance(inst, NcpInstance):
        return ncp_solve_bruteforce(inst, budget)
    if isinstance(inst, RealInstance):
        return sparsest_in_kernel_real(inst.M, bound=bound, budget=budget)
    if isinstance(inst, SvpInstance):
        return None
    raise TypeError(type(inst).__name__)


def _load_instance(path: str):
    return instance_from_dict(json.loads(Path(path).read_text()))


def cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    lines = [f"instance {args.instance}: kind={inst.kind} s={inst.s} claimed_gap={inst.claimed_gap}"]
    prov = inst.provenance
    lines.append("provenance: circuit {} -> system {} -> gadget {} (seed {}) -> instance {}".format(
        prov.get("circuit_hash", ""), prov.get("system_hash", ""), prov.get("gadget", ""),
        prov.get("gadget_seed"), digest(inst.to_dict())))
    ok = True
    if inst.planted is not None:
        inside, residual = planted_in_subspace(inst)
        weight = sum(1 for v in inst.planted if v)
        lines.append(f"planted: in subspace={inside} weight={weight} (s={inst.s})")
        if not inside:
            lines.append(f"planted residual: {residual}")
        ok &= inside and weight <= inst.s
        if isinstance(inst, SvpInstance) and inside:
            norm = svp_norm_check(inst, inst.planted)
            lines.append(f"planted ||x||_{inst.p}^{inst.p} = {norm}")
    yes_bound = inst.s if inst.planted is not None else None
    rep = _oracle(inst, args.budget, yes_bound)
    if rep is not None:
        lines.append("oracle: " + json.dumps(rep.to_dict(), sort_keys=True))
        if inst.planted is not None:
            ok &= rep.optimum is not None and rep.optimum <= inst.s
    if args.against:
        other = _load_instance(args.against)
        bound = 2 * inst.s if isinstance(other, RealInstance) else None
        orep = _oracle(other, args.budget, bound)
        if orep is None:
            raise UsageError("no oracle for the NO instance kind")
        lines.append("no-instance oracle: " + json.dumps(orep.to_dict(), sort_keys=True))
        realized = Fraction(orep.floor, inst.s)
        lines.append(f"realized gap = {orep.floor}/{inst.s} = {realized} (claimed {inst.claimed_gap})")
        ok &= realized > 1
    lines.append("PASS" if ok else "FAIL")
    _write("\n".join(lines) + "\n", args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_gadget(args) -> int:
    if args.fixture:
        if args.fixture not in gd.FIXTURES:
            raise UsageError(f"unknown fixture {args.fixture!r}")
        gadget = gd.FIXTURES[args.fixture]()
    else:
        if args.seed is None:
            raise UsageError("--seed is required for sampled gadgets")
        gadget = gd.sample_gadget(args.n, Fraction(args.eps), args.seed, args.C2)
    cert = gd.certify_gadget(gadget, budget=args.budget, workers=args.workers)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "gadget.json").write_text(_json(gadget.to_dict()))
        (out / "cert.json").write_text(_json(cert.to_dict()))
    else:
        sys.stdout.write(_json({"gadget": gadget.to_dict(), "cert": cert.to_dict()}))
    if args.require_cert and not (cert.complete and cert.wld_verified):
        return EXIT_CERT
    return EXIT_OK


def cmd_experiment(args) -> int:
    if args.seed is None:
        raise UsageError("--seed is required for experiments")
    seeds = [args.seed + i for i in range(args.seeds)]
    buf = io.StringIO()
    fields = list(gd.CSV_FIELDS)
    if args.sweep == "slice-count":
        rows = [gd.slice_count_row(s, args.h, args.N, args.k) for s in seeds]
        fields += ["weight1", "slice_count_next"]
    else:
        rows = [gd.d2_row(s, args.h, args.N, args.k, budget=args.budget, workers=args.workers) for s in seeds]
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _write(buf.getvalue(), args.out)
    if args.sweep == "slice-count":
        mean = Fraction(sum(r["slice_count"] for r in rows), len(rows))
        exp = gd.slice_expectation(args.N, args.k, args.h)
        sys.stderr.write(f"mean slice count {float(mean):.4f}; exact expectation {exp} = {float(exp):.4f}\n")
    else:
        bad = sum(1 for r in rows if r["d2"] is not None and r["d"] is not None and r["d2"] < r["d"])
        sys.stderr.write(f"{len(rows)} seeds, d2 >= d violated in {bad}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gapforge", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--budget", type=int, default=None, help="enumeration budget (capped by GAPFORGE_BUDGET_CAP)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--out")

    r = sub.add_parser("reduce", help="build an instance from a circuit or quadratic system")
    r.add_argument("--from", dest="source", required=True)
    r.add_argument("--target", choices=["mdp", "ncp", "real", "svp"], required=True)
    r.add_argument("--distinguished", action="store_true")
    r.add_argument("--field", default="2")
    r.add_argument("--gadget", default="hadamard:m=2")
    r.add_argument("--tensor", type=int, default=1)
    r.add_argument("--p", type=int, default=2)
    r.add_argument("--seed", type=int)
    r.add_argument("--C2", type=Fraction, default=None)
    r.add_argument("--require-cert", action="store_true")
    common(r)
    r.set_defaults(func=cmd_reduce)

    v = sub.add_parser("verify", help="check an instance (and optionally a NO instance) by brute force")
    v.add_argument("instance")
    v.add_argument("--against")
    common(v)
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("gadget", help="sample or load a gadget and certify it")
    g.add_argument("--fixture")
    g.add_argument("--n", type=int, default=1)
    g.add_argument("--eps", default="1/2")
    g.add_argument("--seed", type=int)
    g.add_argument("--C2", type=Fraction, default=None)
    g.add_argument("--out-dir")
    g.add_argument("--require-cert", action="store_true")
    common(g)
    g.set_defaults(func=cmd_gadget)

    e = sub.add_parser("experiment", help="seed sweeps over Rademacher kernels (CSV)")
    e.add_argument("--sweep", choices=["slice-count", "d2"], required=True)
    e.add_argument("--N", type=int, default=12)
    e.add_argument("--k", type=int, default=2)
    e.add_argument("--h", type=int, default=3)
    e.add_argument("--seeds", type=int, default=100)
    e.add_argument("--seed", type=int)
    common(e)
    e.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except (CircuitSyntaxError, json.JSONDecodeError, KeyError, FileNotFoundError) as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_USAGE
    except BudgetExceeded as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except CertError as exc:
        sys.stderr.write(f"{exc}\n")
        return EXIT_CERT
    except (ReductionError, ValueError) as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
