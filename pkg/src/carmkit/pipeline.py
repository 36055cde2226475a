"""Construction pipeline: smooth primes -> modulus L -> multiplier k0 -> prime pool.

Two modes. In "agp" mode the pool holds primes p = d*k0 + 1 over divisors d of
a squarefree modulus L built from shifted-smooth primes, optionally filtered
to quadratic residues mod L and to a residue class mod M. In "erdos" mode a
directly chosen smooth modulus Lambda replaces that parameterization and the
pool holds primes p with p-1 | Lambda; this is the default desk-scale path
since the faithful x = ceil((M*L')**(2/B)) is astronomically large even for
tiny prime sets.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .arith import Factorization, divisors, factorize, is_prime, jacobi, nth_root_floor
from .errors import CapacityError, ConstructionError, DomainError
from .sieve import SmoothPrimeQuery, build_Q

log = logging.getLogger(__name__)

X_MAX_BITS = 1_000_000


@dataclass(frozen=True)
class PoolFilters:
    """Individually toggleable congruence filters on pool primes."""

    require_qr: bool = False
    require_residue: bool = False


@dataclass(frozen=True)
class Caps:
    """Desk-scale overrides for quantities whose faithful values are astronomical."""

    x_cap: int | None = None
    k_cap: int = 10_000
    pool_cap: int | None = None

    def __post_init__(self):
        if self.x_cap is not None and self.x_cap < 1:
            raise DomainError("x_cap must be >= 1")
        if self.k_cap < 1:
            raise DomainError("k_cap must be >= 1")
        if self.pool_cap is not None and self.pool_cap < 1:
            raise DomainError("pool_cap must be >= 1")


@dataclass(frozen=True)
class ConstructionParams:
    M: int
    a: int
    mode: str = "erdos"
    y: int | None = None
    theta: float | None = None
    B: Fraction | None = None
    Lambda: int | None = None
    caps: Caps = field(default_factory=Caps)
    filters: PoolFilters = field(default_factory=lambda: PoolFilters(True, True))

    def __post_init__(self):
        if self.M < 1:
            raise DomainError(f"M must be >= 1, got {self.M}")
        if math.gcd(self.a, self.M) != 1:
            raise DomainError(f"residue {self.a} is not coprime to modulus {self.M}")
        if self.mode not in ("agp", "erdos"):
            raise DomainError(f"mode must be 'agp' or 'erdos', got {self.mode!r}")
        if self.mode == "agp":
            if self.y is None or self.theta is None or self.B is None:
                raise DomainError("agp mode requires y, theta and B")
            if not 0 < self.B < Fraction(5, 12):
                raise DomainError(f"B must lie in (0, 5/12), got {self.B}")
            if not 1 < self.theta < 2:
                raise DomainError(f"theta must lie in (1, 2), got {self.theta}")
        else:
            if self.Lambda is None or self.Lambda < 2:
                raise DomainError("erdos mode requires Lambda >= 2")


@dataclass(frozen=True)
class ConstructionState:
    """Everything derived from ConstructionParams, immutable once built.

    ``x_faithful`` is None when the exact value would exceed X_MAX_BITS bits;
    ``x_faithful_log2`` always records its size, and ``x`` is the bound the
    scans actually used (the cap, if one applied).
    """

    Q: tuple[int, ...]
    L_prime: int
    x_faithful: int | None
    x_faithful_log2: float
    x: int
    L: int
    L_fact: Factorization
    k0: int
    k0_count: int
    pool: tuple[tuple[int, int], ...]


def build_L_prime(Q) -> int:
    """Product of the smooth-shifted primes."""
    Q = list(Q)
    if not Q:
        raise ConstructionError("no usable primes at these parameters")
    out = 1
    for q in Q:
        out *= q
    return out


def _as_fraction(B) -> Fraction:
    # floats go through their decimal string so 0.4 means 2/5, not the binary float
    if isinstance(B, Fraction):
        return B
    if isinstance(B, float):
        return Fraction(str(B))
    return Fraction(B)


def compute_x(M: int, L_prime: int, B, *, max_bits: int = X_MAX_BITS) -> int:
    """ceil((M*L_prime)**(2/B)) with exact integer root/power arithmetic."""
    B = _as_fraction(B)
    if not 0 < B < Fraction(5, 12):
        raise DomainError(f"B must lie in (0, 5/12), got {B}")
    base = M * L_prime
    if base < 1:
        raise DomainError("M * L_prime must be >= 1")
    exp = 2 / B  # exact Fraction
    work_bits = base.bit_length() * exp.numerator
    if work_bits > max_bits:
        raise CapacityError(
            f"x would need ~{work_bits // max(exp.denominator, 1)} bits "
            f"(> {max_bits} working); set caps.x_cap instead"
        )
    powed = base**exp.numerator
    root = nth_root_floor(powed, exp.denominator)
    if root**exp.denominator == powed:
        return root
    return root + 1


def faithful_x_log2(M: int, L_prime: int, B) -> float:
    """log2 of the uncapped x, for recording when the exact value is oversized."""
    return math.log2(M * L_prime) * float(2 / _as_fraction(B))


def build_L(Q, excluded) -> tuple[int, Factorization]:
    """Product over Q minus the excluded set, with its factorization."""
    kept = sorted(q for q in Q if q not in set(excluded))
    if not kept:
        raise ConstructionError("excluding those primes empties L")
    L = 1
    for q in kept:
        L *= q
    return L, Factorization.of((q, 1) for q in kept)


def is_qr_mod_L(p: int, L_fact: Factorization) -> bool:
    """True iff p is a quadratic residue modulo every prime factor of squarefree odd L."""
    if not L_fact.is_squarefree or any(q == 2 for q in L_fact.primes()):
        raise DomainError("L must be squarefree and odd")
    if math.gcd(p, L_fact.value()) != 1:
        raise DomainError(f"gcd({p}, L) != 1")
    return all(jacobi(p, q) == 1 for q in L_fact.primes())


def _qualifying(d: int, k: int, x: int, M: int, a: int, L: int, L_fact: Factorization, filters: PoolFilters) -> int | None:
    p = d * k + 1
    if p > x or not is_prime(p):
        return None
    if (M * L) % p == 0:
        return None
    if filters.require_qr and not is_qr_mod_L(p, L_fact):
        return None
    if filters.require_residue and p % M != a % M:
        return None
    return p


def find_k0(
    L_fact: Factorization, x: int, M: int, a: int, filters: PoolFilters, k_cap: int
) -> tuple[int, int]:
    """Scan k = 1..k_cap coprime to L for the k giving the most primes d*k+1.

    Counts divisors d | L with p = d*k+1 prime, p <= x, p coprime to M*L, and
    passing the enabled filters. Smallest k wins ties. Raises if every k
    yields zero.
    """
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if k_cap < 1:
        raise DomainError(f"k_cap must be >= 1, got {k_cap}")
    L = L_fact.value()
    divs = divisors(L_fact)
    best_k, best_count = 0, 0
    for k in range(1, k_cap + 1):
        if math.gcd(k, L) != 1:
            continue
        count = sum(1 for d in divs if _qualifying(d, k, x, M, a, L, L_fact, filters) is not None)
        if count > best_count:
            best_k, best_count = k, count
    if best_count == 0:
        raise ConstructionError(f"no multiplier k <= {k_cap} yields any pool prime")
    return best_k, best_count


def build_pool(state: ConstructionState, params: ConstructionParams, *, strict: bool = False) -> list[tuple[int, int]]:
    """All (p, d) with d | L, p = d*k0 + 1 passing the filters, ascending in p.

    ``strict`` re-checks gcd((p-1)/d, L) = 1, which holds automatically when
    gcd(k0, L) = 1; it exists for diagnostic runs with hand-picked k0.
    """
    out = []
    L = state.L
    for d in divisors(state.L_fact):
        p = _qualifying(d, state.k0, state.x, params.M, params.a, L, state.L_fact, params.filters)
        if p is None:
            continue
        if strict and math.gcd((p - 1) // d, L) != 1:
            continue
        out.append((p, d))
    out.sort()
    if params.caps.pool_cap is not None:
        out = out[: params.caps.pool_cap]
    if len(out) < 3:
        log.warning("pool has only %d primes; cannot form a Carmichael number", len(out))
    return out


def erdos_pool(Lambda: int, M: int, a: int, pool_cap: int | None = None) -> list[int]:
    """All primes p with p-1 | Lambda and p coprime to Lambda*M, ascending.

    The residue a plays no role in membership (subset products, not single
    primes, hit the residue class); it is accepted for interface symmetry.
    """
    if Lambda < 2:
        raise DomainError(f"Lambda must be >= 2, got {Lambda}")
    pool = []
    for d in divisors(factorize(Lambda)):
        p = d + 1
        if is_prime(p) and (Lambda * M) % p != 0:
            pool.append(p)
    pool.sort()
    if pool_cap is not None:
        pool = pool[:pool_cap]
    if len(pool) < 3:
        raise ConstructionError(
            f"only {len(pool)} primes p with p-1 | {Lambda}; need at least 3"
        )
    return pool


def run_agp_construction(params: ConstructionParams) -> ConstructionState:
    """The full agp-mode pipeline at desk scale: Q, L', x, L, k0, pool."""
    if params.mode != "agp":
        raise DomainError("run_agp_construction requires agp-mode params")
    Q = build_Q(SmoothPrimeQuery(params.y, params.theta, params.M))
    L_prime = build_L_prime(Q)
    log2x = faithful_x_log2(params.M, L_prime, params.B)
    x_faithful: int | None
    try:
        x_faithful = compute_x(params.M, L_prime, params.B)
    except CapacityError:
        x_faithful = None
    if params.caps.x_cap is not None:
        x = params.caps.x_cap if x_faithful is None else min(x_faithful, params.caps.x_cap)
    elif x_faithful is not None:
        x = x_faithful
    else:
        raise CapacityError("faithful x is oversized and no caps.x_cap was provided")
    L, L_fact = build_L(Q, set())
    k0, count = find_k0(L_fact, x, params.M, params.a, params.filters, params.caps.k_cap)
    state = ConstructionState(
        Q=tuple(Q),
        L_prime=L_prime,
        x_faithful=x_faithful,
        x_faithful_log2=log2x,
        x=x,
        L=L,
        L_fact=L_fact,
        k0=k0,
        k0_count=count,
        pool=(),
    )
    return replace(state, pool=tuple(build_pool(state, params)))
