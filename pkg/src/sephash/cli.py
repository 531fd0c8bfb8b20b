"""Command-line front end.

Subcommands: seq, equations, solfree, phf build|verify, bounds, bench,
export.  Numeric flags accept power expressions like ``2^64``.  A JSON
config file supplies defaults that individual flags override.  Exit
codes: 0 success/verified, 1 verification failure (a witness exists),
2 usage or precondition error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

from . import hashfam, sequences, solfree
from .arrays import BipartiteArray, array_from_sequence
from .hashfam import EnumerationCapError, HashFamilyMatrix, SHFType, TowerCollisionError
from .solfree import CapExceededError

EXIT_OK = 0
EXIT_UNVERIFIED = 1
EXIT_USAGE = 2


def parse_int_expr(text: str) -> int:
    """Parse an integer or a power expression such as ``2^64`` or ``2**10``."""
    s = text.strip().replace("_", "")
    for op in ("**", "^"):
        if op in s:
            base, _, exp = s.partition(op)
            return int(base) ** int(exp)
    return int(s)


def _int_list(text: str) -> list[int]:
    return [parse_int_expr(part) for part in text.split(",") if part.strip()]


@dataclass
class RunConfig:
    """Defaults shared by the subcommands; flags override file values."""

    a: float = 0.5
    b: float = 0.0
    t: int = 3
    m: int | None = None
    q: int | None = None
    arity_cap: int = solfree.DEFAULT_ARITY_CAP
    check_cap: int = solfree.DEFAULT_CHECK_CAP
    exact_cap: int = solfree.DEFAULT_EXACT_CAP
    family_cap: int = 5_000_000
    log_base: float = 2.0
    out: str | None = None

    @classmethod
    def load(cls, path: str | None) -> "RunConfig":
        cfg = cls()
        if path:
            data = json.loads(Path(path).read_text())
            known = {f.name for f in fields(cls)}
            for key, value in data.items():
                if key not in known:
                    raise ValueError(f"unknown config key {key!r}")
                setattr(cfg, key, value)
        return cfg


def _merge(cfg: RunConfig, args: argparse.Namespace, name: str, default=None):
    value = getattr(args, name, None)
    if value is not None:
        return value
    cfg_value = getattr(cfg, name, None)
    return cfg_value if cfg_value is not None else default


def _write(path: str, text: str) -> None:
    Path(path).write_text(text)
    print(f"wrote {path}")


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _r_equations(r: list[int], k_values: list[int] | None = None) -> list[BipartiteArray]:
    """All rotation-class equations of R, for every length 3..|R| by default."""
    ks = k_values if k_values else list(range(3, len(r) + 1))
    seen: set[tuple[tuple[int, ...], tuple[int, ...]]] = set()
    out: list[BipartiteArray] = []
    for k in ks:
        for u in sequences.enumerate_sequences(r, k):
            eq = array_from_sequence(u)
            key = (eq.pos, eq.neg)
            if key not in seen:
                seen.add(key)
                out.append(eq)
    return out


def cmd_seq(args: argparse.Namespace, cfg: RunConfig) -> int:
    u = tuple(_int_list(args.sequence))
    info = sequences.analyze(u)
    if args.json:
        print(_json_text(info.to_json_dict()), end="")
    else:
        print(f"tau = {info.tau}")
        print(f"epsilon = {info.epsilon}")
        print(f"chi = {list(info.chi)}")
        for j, d in enumerate(info.deletions):
            print(f"U({j}) = {list(d)}")
    return EXIT_OK


def cmd_equations(args: argparse.Namespace, cfg: RunConfig) -> int:
    r = _int_list(args.r)
    ks = [args.k] if args.k else None
    for k in ks or range(3, len(r) + 1):
        for u in sequences.enumerate_sequences(r, k):
            eq = array_from_sequence(u)
            print(json.dumps({"sequence": list(u), **eq.to_json_dict()}, sort_keys=True))
    return EXIT_OK


def _parse_equation_args(args: argparse.Namespace) -> BipartiteArray:
    if args.u:
        return array_from_sequence(tuple(_int_list(args.u)))
    if args.pos and args.neg:
        return BipartiteArray(tuple(_int_list(args.pos)), tuple(_int_list(args.neg)))
    raise ValueError("this strategy needs --u or both --pos and --neg")


def cmd_solfree(args: argparse.Namespace, cfg: RunConfig) -> int:
    m = _merge(cfg, args, "m")
    if m is None and args.strategy != "behrend":
        raise ValueError("--m is required")
    arity_cap = _merge(cfg, args, "arity_cap")
    check_cap = _merge(cfg, args, "check_cap")
    if args.strategy in ("greedy", "exact"):
        if not args.r:
            raise ValueError(f"strategy {args.strategy} needs --r")
        eqs = _r_equations(_int_list(args.r))
        if args.strategy == "greedy":
            cert = solfree.greedy_solution_free(
                m, eqs, arity_cap=arity_cap, check_cap=check_cap
            )
        else:
            cert = solfree.max_solution_free_exact(
                m, eqs, m_cap=_merge(cfg, args, "exact_cap"),
                arity_cap=arity_cap, check_cap=check_cap,
            )
    elif args.strategy == "behrend":
        eq = _parse_equation_args(args)
        if m is None:
            raise ValueError("--m is required")
        cert = solfree.behrend_base(eq, m, arity_cap=arity_cap, check_cap=check_cap)
    elif args.strategy == "pipeline":
        if not args.u:
            raise ValueError("strategy pipeline needs --u")
        cert = solfree.pipeline_single_equation(
            tuple(_int_list(args.u)), _merge(cfg, args, "a"), m,
            arity_cap=arity_cap, check_cap=check_cap,
        )
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown strategy {args.strategy}")
    out = _merge(cfg, args, "out", "solfree")
    _write(f"{out}.cert.json", _json_text(cert.to_json_dict()))
    _write(f"{out}.set.txt", cert.set_text())
    print(f"size = {len(cert.set_m)}, method = {cert.method}, verified = {cert.verified}")
    return EXIT_OK if cert.verified else EXIT_UNVERIFIED


def cmd_phf_build(args: argparse.Namespace, cfg: RunConfig) -> int:
    q = _merge(cfg, args, "q")
    if q is None:
        raise ValueError("--q is required")
    r = _int_list(args.r)
    arity_cap = _merge(cfg, args, "arity_cap")
    check_cap = _merge(cfg, args, "check_cap")
    if args.auto_m:
        rank = max(r) - min(r)
        bound = (q - 1) // rank
        cert = solfree.greedy_solution_free(
            bound, _r_equations(r), arity_cap=arity_cap, check_cap=check_cap
        )
        m_set, verified = list(cert.set_m), True
        print(f"auto-m: greedy set of size {len(m_set)} in [1, {bound}]")
    elif args.m_set:
        m_set, verified = _int_list(args.m_set), False
        if args.verify_m:
            cert = solfree.verify_solution_free(
                m_set, _r_equations(r), arity_cap=arity_cap, check_cap=check_cap
            )
            if not cert.verified:
                print(f"m_set is NOT solution-free: witness {cert.witness.to_json_dict()}")
                return EXIT_UNVERIFIED
            verified = True
    else:
        raise ValueError("phf build needs --auto-m or --m-set")
    matrix = hashfam.build_phf(r, m_set, q, verified_free=verified)
    out = _merge(cfg, args, "out", "matrix")
    _write(f"{out}.json", _json_text(matrix.to_json_dict()))
    if args.csv:
        _write(f"{out}.csv", matrix.to_csv_text())
    print(f"matrix: {matrix.n_rows} x {matrix.n_cols} over Z_{q}")
    return EXIT_OK


def cmd_phf_verify(args: argparse.Namespace, cfg: RunConfig) -> int:
    matrix = HashFamilyMatrix.from_json_dict(json.loads(Path(args.matrix).read_text()))
    weights = _int_list(args.type)
    ok, witness = hashfam.verify_shf(
        matrix, SHFType(tuple(weights)), family_cap=_merge(cfg, args, "family_cap")
    )
    if ok:
        print(f"PASS: every family of type {weights} is separated")
        return EXIT_OK
    print(f"FAIL: unseparated family {[list(part) for part in witness]}")
    if args.rainbow:
        cycle = hashfam.find_rainbow_cycle(matrix, matrix.n_rows)
        if cycle is None:
            print("no rainbow cycle found")
        else:
            print(f"rainbow cycle: columns {list(cycle.columns)}, rows {list(cycle.rows)}")
            if matrix.provenance is not None:
                u_seq, values, total = hashfam.rainbow_cycle_relation(matrix, cycle)
                print(f"relation: sequence {list(u_seq)} at values {list(values)} -> {total}")
    return EXIT_UNVERIFIED


def cmd_bounds(args: argparse.Namespace, cfg: RunConfig) -> int:
    q = _merge(cfg, args, "q")
    if q is None:
        raise ValueError("--q is required")
    shf_type = SHFType(tuple(_int_list(args.type)))
    upper = hashfam.bound_upper(args.n, q, shf_type)
    lower = hashfam.bound_lower_lll(args.n, q, shf_type.u)
    print(f"upper = {upper}")
    print(f"lower = {lower}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace, cfg: RunConfig) -> int:
    t = _merge(cfg, args, "t")
    q_values = _int_list(args.q_list) if args.q_list else []
    if args.r:
        r = _int_list(args.r)
    elif t == 3:
        r = [0, 1, 2]
    else:
        raise ValueError("bench needs --r when t != 3")
    if len(r) != t:
        raise ValueError(f"--r has {len(r)} elements but t = {t}")
    eqs = _r_equations(r)
    rank = max(r) - min(r)
    shf_type = SHFType(tuple([1] * t))
    lines = ["q,m_size,n,upper,lower,seconds"]
    for q in q_values:
        start = time.perf_counter()
        bound = (q - 1) // rank
        if args.strategy == "greedy":
            cert = solfree.greedy_solution_free(bound, eqs)
        else:
            cert = solfree.max_solution_free_exact(bound, eqs, m_cap=_merge(cfg, args, "exact_cap"))
        elapsed = time.perf_counter() - start
        n = q * len(cert.set_m)
        upper = hashfam.bound_upper(t, q, shf_type)
        lower = hashfam.bound_lower_lll(t, q, t)
        lines.append(f"{q},{len(cert.set_m)},{n},{upper},{lower:.6g},{elapsed:.3f}")
    table = "\n".join(lines) + "\n"
    out = _merge(cfg, args, "out")
    if out:
        _write(out, table)
    else:
        print(table, end="")
    return EXIT_OK


def cmd_export(args: argparse.Namespace, cfg: RunConfig) -> int:
    data = json.loads(Path(args.source).read_text())
    if args.format == "txt":
        if "set" not in data:
            raise ValueError("txt export needs a certificate file with a set")
        text = "".join(f"{x}\n" for x in data["set"])
    elif args.format == "csv":
        if "rows" not in data:
            raise ValueError("csv export needs a matrix file")
        text = HashFamilyMatrix.from_json_dict(data).to_csv_text()
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown format {args.format}")
    if args.out:
        _write(args.out, text)
    else:
        print(text, end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sephash",
        description="Perfect/separating hash families via solution-free sets.",
    )
    parser.add_argument("--config", help="JSON file with RunConfig defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("seq", help="analyze a permutation sequence")
    p.add_argument("sequence", help="comma-separated distinct nonnegative integers")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_seq)

    p = sub.add_parser("equations", help="list rotation-class equations of R")
    p.add_argument("--r", required=True)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_equations)

    p = sub.add_parser("solfree", help="construct a solution-free set")
    p.add_argument("--strategy", required=True, choices=["greedy", "exact", "behrend", "pipeline"])
    p.add_argument("--r", help="ground set, e.g. 0,1,2")
    p.add_argument("--u", help="permutation sequence (behrend/pipeline)")
    p.add_argument("--pos", help="positive coefficients (behrend)")
    p.add_argument("--neg", help="negative coefficients (behrend)")
    p.add_argument("--m", type=parse_int_expr)
    p.add_argument("--a", type=float, dest="a")
    p.add_argument("--out")
    p.add_argument("--exact-cap", type=int, dest="exact_cap")
    p.add_argument("--arity-cap", type=int, dest="arity_cap")
    p.add_argument("--check-cap", type=parse_int_expr, dest="check_cap")
    p.set_defaults(func=cmd_solfree)

    p = sub.add_parser("phf", help="build or verify hash-family matrices")
    phf_sub = p.add_subparsers(dest="phf_command", required=True)

    b = phf_sub.add_parser("build")
    b.add_argument("--r", required=True)
    b.add_argument("--q", type=parse_int_expr)
    b.add_argument("--auto-m", action="store_true")
    b.add_argument("--m-set", dest="m_set")
    b.add_argument("--verify-m", action="store_true", dest="verify_m")
    b.add_argument("--csv", action="store_true")
    b.add_argument("--out")
    b.add_argument("--arity-cap", type=int, dest="arity_cap")
    b.add_argument("--check-cap", type=parse_int_expr, dest="check_cap")
    b.set_defaults(func=cmd_phf_build)

    v = phf_sub.add_parser("verify")
    v.add_argument("--matrix", required=True)
    v.add_argument("--type", required=True, help="weights, e.g. 1,1,1")
    v.add_argument("--rainbow", action="store_true", help="search for a failure cycle")
    v.add_argument("--family-cap", type=parse_int_expr, dest="family_cap")
    v.set_defaults(func=cmd_phf_verify)

    p = sub.add_parser("bounds", help="universe-size bound formulas")
    p.add_argument("--n", type=int, required=True, help="number of rows N")
    p.add_argument("--q", type=parse_int_expr)
    p.add_argument("--type", required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("bench", help="tabulate achieved n against the bounds")
    p.add_argument("--q-list", dest="q_list", required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--r")
    p.add_argument("--strategy", default="greedy", choices=["greedy", "exact"])
    p.add_argument("--exact-cap", type=int, dest="exact_cap")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export", help="re-emit certificates or matrices")
    p.add_argument("--source", required=True, help="certificate or matrix JSON")
    p.add_argument("--format", required=True, choices=["txt", "csv"])
    p.add_argument("--out")
    p.set_defaults(func=cmd_export)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = RunConfig.load(args.config)
        return args.func(args, cfg)
    except (ValueError, CapExceededError, EnumerationCapError, TowerCollisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
