"""Command-line surface: verify / census / construct / solve.

Output is deterministic and machine-first: json-lines by default (big
integers as decimal strings, never floats), csv and human formats on
request. Exit codes: 0 = at least one result, 1 = completed empty,
2 = usage error, 3 = capacity or infeasibility.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from .arith import factorize
from .errors import (
    CapacityError,
    CarmkitError,
    ConstructionError,
    DomainError,
    InfeasibleError,
)
from .korselt import Census, census, enumerate_carmichael, korselt_check
from .pipeline import (
    Caps,
    ConstructionParams,
    PoolFilters,
    erdos_pool,
    run_agp_construction,
)
from .solver import (
    AssemblySpec,
    CarmichaelCertificate,
    assemble,
    derive_target,
    subset_product_enumerate,
    subset_product_find,
)

FORMATS = ("json-lines", "csv", "human")


@dataclass
class RunConfig:
    subcommand: str
    format: str = "json-lines"
    output: str | None = None
    threads: int = 1
    n: int | None = None
    limit: int | None = None
    modulus: int | None = None
    residue: int | None = None
    mode: str = "erdos"
    Lambda: int | None = None
    y: int | None = None
    theta: float | None = None
    B: Fraction | None = None
    x_cap: int | None = None
    k_cap: int = 10_000
    pool_cap: int | None = None
    max_factors: int | None = None
    pool_file: str | None = None
    target: int | None = None
    min_size: int = 3
    qr_filter: bool = True
    residue_filter: bool = True


def _default_threads() -> int:
    env = os.environ.get("CARMKIT_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carmkit",
        description="Construct, search for, and certify Carmichael numbers in residue classes.",
    )
    parser.add_argument("--format", choices=FORMATS, default="json-lines")
    parser.add_argument("--output", metavar="PATH", default=None)
    parser.add_argument("--threads", type=int, default=None, metavar="N")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("verify", help="check a single number against Korselt's criterion")
    p.add_argument("n", type=int)

    p = sub.add_parser("census", help="count Carmichael numbers per residue class")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--modulus", type=int, required=True)

    p = sub.add_parser("construct", help="build a Carmichael number in a residue class")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--residue", type=int, required=True)
    p.add_argument("--mode", choices=("agp", "erdos"), default="erdos")
    p.add_argument("--lambda", dest="Lambda", type=int, default=None,
                   help="smooth modulus for erdos mode")
    p.add_argument("--y", type=int, default=None)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--B", type=str, default=None, help="rational in (0, 5/12), e.g. 0.4 or 2/5")
    p.add_argument("--x-cap", dest="x_cap", type=int, default=None)
    p.add_argument("--k-cap", dest="k_cap", type=int, default=10_000)
    p.add_argument("--pool-cap", dest="pool_cap", type=int, default=None)
    p.add_argument("--max-factors", dest="max_factors", type=int, default=None)
    p.add_argument("--qr-filter", dest="qr_filter", action=argparse.BooleanOptionalAction,
                   default=True, help="require pool primes to be squares mod L (agp mode)")
    p.add_argument("--residue-filter", dest="residue_filter", action=argparse.BooleanOptionalAction,
                   default=True, help="require pool primes to be a mod M (agp mode)")

    p = sub.add_parser("solve", help="subset-product search over an explicit pool")
    p.add_argument("--pool", dest="pool_file", required=True, metavar="FILE",
                   help="one decimal integer per line")
    p.add_argument("--modulus", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--min-size", dest="min_size", type=int, default=3)
    p.add_argument("--max-size", dest="max_size", type=int, default=None)
    return parser


def parse_args(argv) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.threads is not None and ns.threads < 1:
        parser.error("--threads must be >= 1")
    cfg = RunConfig(subcommand=ns.subcommand, format=ns.format, output=ns.output,
                    threads=ns.threads if ns.threads else _default_threads())
    if ns.subcommand == "verify":
        if ns.n < 1:
            parser.error("n must be >= 1")
        cfg.n = ns.n
    elif ns.subcommand == "census":
        if ns.limit < 1:
            parser.error("--limit must be >= 1")
        if ns.modulus < 1:
            parser.error("--modulus must be >= 1")
        cfg.limit, cfg.modulus = ns.limit, ns.modulus
    elif ns.subcommand == "construct":
        if ns.modulus < 1:
            parser.error("--modulus must be >= 1")
        if math.gcd(ns.residue, ns.modulus) != 1:
            parser.error(f"--residue {ns.residue} is not coprime to --modulus {ns.modulus}")
        cfg.modulus, cfg.residue, cfg.mode = ns.modulus, ns.residue, ns.mode
        cfg.Lambda, cfg.y, cfg.theta = ns.Lambda, ns.y, ns.theta
        cfg.x_cap, cfg.k_cap, cfg.pool_cap = ns.x_cap, ns.k_cap, ns.pool_cap
        cfg.max_factors = ns.max_factors
        cfg.qr_filter, cfg.residue_filter = ns.qr_filter, ns.residue_filter
        if ns.B is not None:
            try:
                cfg.B = Fraction(ns.B)
            except (ValueError, ZeroDivisionError):
                parser.error(f"--B must be a rational, got {ns.B!r}")
        if ns.mode == "erdos" and (ns.Lambda is None or ns.Lambda < 2):
            parser.error("erdos mode requires --lambda with a value >= 2")
        if ns.mode == "agp" and (ns.y is None or ns.theta is None or cfg.B is None):
            parser.error("agp mode requires --y, --theta and --B")
        if ns.max_factors is not None and ns.max_factors < 3:
            parser.error("--max-factors must be >= 3 (Carmichael numbers have >= 3 factors)")
        if ns.k_cap < 1 or (ns.pool_cap is not None and ns.pool_cap < 1) or (
            ns.x_cap is not None and ns.x_cap < 1
        ):
            parser.error("caps must be >= 1")
    elif ns.subcommand == "solve":
        if ns.modulus < 1:
            parser.error("--modulus must be >= 1")
        if ns.min_size < 1:
            parser.error("--min-size must be >= 1")
        cfg.pool_file, cfg.modulus, cfg.target = ns.pool_file, ns.modulus, ns.target
        cfg.min_size, cfg.max_factors = ns.min_size, ns.max_size
    return cfg


# ---------------------------------------------------------------------------
# serialization


def _cert_dict(cert: CarmichaelCertificate) -> dict:
    return {
        "n": str(cert.n),
        "primes": [str(p) for p in cert.prime_factors],
        "mode": cert.mode,
        "L": str(cert.L),
        "multiplier": str(cert.shared_multiplier),
        "M": cert.M,
        "a": cert.a,
        "checks": dict(cert.checks),
    }


def emit_certificate(cert: CarmichaelCertificate, fmt: str) -> str:
    """One output line for a fully verified certificate."""
    failed = [k for k, v in cert.checks.items() if not v and k != "probabilistic_primality_used"]
    if failed:
        raise DomainError(f"refusing to emit certificate with failed checks: {failed}")
    if fmt == "json-lines":
        return json.dumps(_cert_dict(cert), separators=(",", ":"))
    if fmt == "csv":
        return "{},{},{},{},{},{},{}".format(
            cert.n, "|".join(str(p) for p in cert.prime_factors), cert.mode,
            cert.L, cert.shared_multiplier, cert.M, cert.a,
        )
    factors = " · ".join(str(p) for p in cert.prime_factors)
    shared_mod = cert.shared_multiplier * cert.L if cert.mode == "agp" else cert.shared_multiplier
    line = f"{cert.n} = {factors}"
    congruences = []
    if shared_mod:
        congruences.append(f"≡ 1 mod {shared_mod}")
    if cert.M > 1:
        congruences.append(f"≡ {cert.a} mod {cert.M}")
    if congruences:
        line += " (" + ", ".join(congruences) + ")"
    return line


def parse_certificate(line: str) -> CarmichaelCertificate:
    """Inverse of json-lines emit_certificate."""
    obj = json.loads(line)
    return CarmichaelCertificate(
        n=int(obj["n"]),
        prime_factors=tuple(int(p) for p in obj["primes"]),
        mode=obj["mode"],
        shared_multiplier=int(obj["multiplier"]),
        L=int(obj["L"]),
        M=obj["M"],
        a=obj["a"],
        checks=dict(obj["checks"]),
    )


def emit_census(result: Census, fmt: str) -> str:
    """Census table: csv rows ascending by residue; 'other' appended if nonzero."""
    rows = sorted(result.counts.items())
    if fmt == "csv":
        lines = ["residue,count"] + [f"{a},{c}" for a, c in rows]
        if result.other:
            lines.append(f"other,{result.other}")
        return "\n".join(lines) + "\n"
    if fmt == "json-lines":
        lines = [json.dumps({"residue": a, "count": c}, separators=(",", ":")) for a, c in rows]
        if result.other:
            lines.append(json.dumps({"residue": "other", "count": result.other},
                                    separators=(",", ":")))
        return "\n".join(lines) + "\n"
    lines = [f"residue {a} mod {result.modulus}: {c}" for a, c in rows]
    if result.other:
        lines.append(f"shared factor with {result.modulus}: {result.other}")
    return "\n".join(lines) + "\n"


def _meta(cfg: RunConfig) -> dict:
    pairs = {
        "command": cfg.subcommand,
        "format": cfg.format,
    }
    if cfg.subcommand == "verify":
        pairs["n"] = str(cfg.n)
    elif cfg.subcommand == "census":
        pairs.update(limit=cfg.limit, modulus=cfg.modulus)
    elif cfg.subcommand == "construct":
        pairs.update(modulus=cfg.modulus, residue=cfg.residue, mode=cfg.mode)
        if cfg.mode == "erdos":
            pairs["lambda"] = cfg.Lambda
        else:
            pairs.update(y=cfg.y, theta=cfg.theta, B=str(cfg.B),
                         x_cap=cfg.x_cap, k_cap=cfg.k_cap,
                         qr_filter=cfg.qr_filter, residue_filter=cfg.residue_filter)
        if cfg.pool_cap is not None:
            pairs["pool_cap"] = cfg.pool_cap
        if cfg.max_factors is not None:
            pairs["max_factors"] = cfg.max_factors
    elif cfg.subcommand == "solve":
        pairs.update(pool=cfg.pool_file, modulus=cfg.modulus,
                     target=str(cfg.target), min_size=cfg.min_size)
    return pairs


def _header_lines(cfg: RunConfig) -> list[str]:
    # thread_count deliberately omitted: output must not vary with it
    if cfg.format == "json-lines":
        return [json.dumps({"meta": _meta(cfg)}, separators=(",", ":"))]
    kv = " ".join(f"{k}={v}" for k, v in _meta(cfg).items())
    return [f"# {kv}"]


# ---------------------------------------------------------------------------
# subcommand drivers; each returns (exit_code, output_lines)


def _run_verify(cfg: RunConfig) -> tuple[int, list[str]]:
    n = cfg.n
    f = factorize(n)
    if not korselt_check(n, f):
        print(f"{n} is not a Carmichael number", file=sys.stderr)
        return 1, []
    cert = assemble(f.primes(), AssemblySpec(mode="external", multiplier=0, L=0, M=1, a=0))
    return 0, [emit_certificate(cert, cfg.format)]


def _run_census(cfg: RunConfig) -> tuple[int, list[str]]:
    if cfg.modulus == 1:
        # single residue class 0 mod 1; the library census contract starts at 2
        total = len(enumerate_carmichael(cfg.limit, threads=cfg.threads))
        result = Census(limit=cfg.limit, modulus=1, counts={0: total}, other=0)
    else:
        result = census(cfg.limit, cfg.modulus, threads=cfg.threads)
    text = emit_census(result, cfg.format)
    return (0 if result.total > 0 else 1), text.splitlines()


def _construct_erdos(cfg: RunConfig) -> tuple[int, list[str]]:
    pool = erdos_pool(cfg.Lambda, cfg.modulus, cfg.residue, cfg.pool_cap)
    target = derive_target(cfg.Lambda, cfg.modulus, cfg.residue)
    subset = subset_product_find(pool, target.modulus, target.h, 3, cfg.max_factors)
    if subset is None:
        note = ""
        if len(pool) <= 24:
            hits = subset_product_enumerate(pool, target.modulus, target.h, 3, cfg.max_factors)
            note = f"; exhaustive scan of {2 ** len(pool)} subsets confirms none exists"
        print(f"no qualifying subset in pool of {len(pool)} primes{note}", file=sys.stderr)
        return 1, []
    cert = assemble(
        [pool[i] for i in subset],
        AssemblySpec(mode="erdos", multiplier=cfg.Lambda, L=0, M=cfg.modulus, a=cfg.residue),
    )
    return 0, [emit_certificate(cert, cfg.format)]


def _construct_agp(cfg: RunConfig) -> tuple[int, list[str]]:
    params = ConstructionParams(
        M=cfg.modulus,
        a=cfg.residue,
        mode="agp",
        y=cfg.y,
        theta=cfg.theta,
        B=cfg.B,
        caps=Caps(x_cap=cfg.x_cap, k_cap=cfg.k_cap, pool_cap=cfg.pool_cap),
        filters=PoolFilters(require_qr=cfg.qr_filter, require_residue=cfg.residue_filter),
    )
    state = run_agp_construction(params)
    primes = [p for p, _ in state.pool]
    if len(primes) < 3:
        print(f"pool of {len(primes)} primes is too small", file=sys.stderr)
        return 1, []
    target = derive_target(state.L, cfg.modulus, cfg.residue)
    subset = subset_product_find(primes, cfg.modulus * state.L, target.h, 3, cfg.max_factors)
    if subset is None:
        print(f"no qualifying subset in pool of {len(primes)} primes", file=sys.stderr)
        return 1, []
    cert = assemble(
        [primes[i] for i in subset],
        AssemblySpec(mode="agp", multiplier=state.k0, L=state.L, M=cfg.modulus, a=cfg.residue),
    )
    return 0, [emit_certificate(cert, cfg.format)]


def _run_solve(cfg: RunConfig) -> tuple[int, list[str]]:
    with open(cfg.pool_file, encoding="utf-8") as fh:
        pool = [int(line) for line in fh if line.strip()]
    subset = subset_product_find(pool, cfg.modulus, cfg.target, cfg.min_size, cfg.max_factors)
    if subset is None:
        print("no qualifying subset", file=sys.stderr)
        return 1, []
    elements = [pool[i] for i in subset]
    product = 1
    for e in elements:
        product *= e
    if cfg.format == "json-lines":
        line = json.dumps(
            {
                "indices": list(subset),
                "elements": [str(e) for e in elements],
                "product": str(product % cfg.modulus),
                "target": str(cfg.target % cfg.modulus),
                "modulus": str(cfg.modulus),
            },
            separators=(",", ":"),
        )
    elif cfg.format == "csv":
        line = "indices,elements\n{},{}".format(
            "|".join(str(i) for i in subset), "|".join(str(e) for e in elements)
        )
    else:
        joined = " · ".join(str(e) for e in elements)
        line = f"{joined} ≡ {cfg.target % cfg.modulus} (mod {cfg.modulus})"
    return 0, [line]


def run(cfg: RunConfig) -> int:
    driver = {
        "verify": _run_verify,
        "census": _run_census,
        "construct": _construct_erdos if cfg.mode == "erdos" else _construct_agp,
        "solve": _run_solve,
    }[cfg.subcommand]
    try:
        code, lines = driver(cfg)
    except (CapacityError, InfeasibleError, ConstructionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    out = "\n".join(_header_lines(cfg) + lines) + "\n"
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


def main(argv=None) -> int:
    cfg = parse_args(sys.argv[1:] if argv is None else argv)
    try:
        return run(cfg)
    except CarmkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
