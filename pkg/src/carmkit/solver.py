"""Unit-group invariants, residue targets, subset-product search, certification.

The searches are explicit and complete: meet-in-the-middle for pools up to 40
elements, a layered residue DP with witness reconstruction beyond that, and a
full 2**n scan as the exhaustive oracle for small pools. A found subset is
certified by independent re-checks before a certificate is emitted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .arith import (
    Factorization,
    PROBABLE_PRIME_THRESHOLD,
    carmichael_lambda,
    crt,
    euler_phi,
    factorize,
    is_prime,
    multiplicative_order,
)
from .errors import (
    AssemblyError,
    CapacityError,
    CrtConflictError,
    DomainError,
    InfeasibleError,
    OrderingError,
)
from .korselt import korselt_check

MITM_LIMIT = 40
ENUMERATE_LIMIT = 24
DP_CELL_BOUND = 200_000_000
_KERNEL_MOD_LIMIT = 1 << 31  # int64 product safety


@dataclass(frozen=True)
class GroupSpec:
    """The unit group modulo ``modulus`` with its order and exponent.

    ``phi_M`` carries phi of the residue modulus M separately because the
    t-formula needs it while the group itself lives mod M*L (or lcm(Lambda, M)).
    """

    modulus: int
    modulus_fact: Factorization
    order: int
    exponent: int
    phi_M: int = 1

    def __post_init__(self):
        if self.order % self.exponent != 0:
            raise DomainError("group exponent must divide group order")

    @classmethod
    def from_modulus_fact(cls, fact: Factorization, phi_M: int = 1) -> "GroupSpec":
        return cls(
            modulus=fact.value(),
            modulus_fact=fact,
            order=euler_phi(fact),
            exponent=carmichael_lambda(fact),
            phi_M=phi_M,
        )


@dataclass(frozen=True)
class GroupInvariants:
    lambda_G: int
    omega_lambda: int
    omega_order: int
    n_bound: float
    s_G: int
    t: float
    omega_L: int
    degenerate: bool = False


@dataclass(frozen=True)
class ResidueTarget:
    """The element h with h = 1 mod L and h = a mod M, inside (Z/modulus)^x."""

    h: int
    modulus: int
    mod_L: int
    mod_M: int


@dataclass(frozen=True)
class AssemblySpec:
    """Shared construction data a certificate is checked against."""

    mode: str  # "agp" | "erdos" | "external"
    multiplier: int  # k0 (agp), Lambda (erdos), 0 (external)
    L: int  # 0 when unused
    M: int
    a: int


@dataclass(frozen=True)
class CarmichaelCertificate:
    n: int
    prime_factors: tuple[int, ...]
    mode: str
    shared_multiplier: int
    L: int
    M: int
    a: int
    checks: dict[str, bool]


def compute_invariants(
    spec: GroupSpec, omega_L: int, x: int, *, log_base: float | None = None
) -> GroupInvariants:
    """Evaluate the zero-sum threshold s(G), the identity-threshold bound and t.

    n_bound = lambda * (1 + log|G|/lambda)
    s(G)    = ceil(5 * lambda^2 * Omega(lambda) * log(3 * lambda * Omega(|G|)))
    t       = (6/5)**omega_L / (60 * phi(M) * log x)

    Logarithms are natural unless ``log_base`` overrides them (sensitivity
    checks only; the defaults are the contract).
    """
    if x < 3:
        raise DomainError(f"x must be >= 3, got {x}")

    def _log(v: float) -> float:
        return math.log(v) if log_base is None else math.log(v, log_base)

    lam = spec.exponent
    omega_lambda = factorize(lam).big_omega if lam > 1 else 0
    omega_order = factorize(spec.order).big_omega if spec.order > 1 else 0
    # lam * (1 + log|G|/lam) = lam + log|G|; may exceed float range for huge groups
    try:
        n_bound = float(lam) + (_log(spec.order) if spec.order > 1 else 0.0)
    except OverflowError:
        n_bound = math.inf
    if lam >= 2:
        # ceil(A * c) in exact arithmetic (A can dwarf the float range)
        A = 5 * lam * lam * omega_lambda
        c = Fraction(_log(3 * lam * omega_order))
        s_G = int(-(-A * c.numerator // c.denominator))
    else:
        s_G = 0
    t = (6 / 5) ** omega_L / (60 * spec.phi_M * _log(x))
    return GroupInvariants(
        lambda_G=lam,
        omega_lambda=omega_lambda,
        omega_order=omega_order,
        n_bound=n_bound,
        s_G=s_G,
        t=t,
        omega_L=omega_L,
        degenerate=lam < 2,
    )


def exact_identity_threshold(modulus: int, *, max_group: int = 36) -> int:
    """Exact smallest N such that every N non-identity units contain an
    identity-product subset (exhaustive search; unit groups of order <= 36)."""
    if modulus < 1:
        raise DomainError(f"modulus must be >= 1, got {modulus}")
    units = [a for a in range(1, modulus) if math.gcd(a, modulus) == 1] or [0]
    if len(units) > max_group:
        raise CapacityError(f"group order {len(units)} exceeds exhaustive cap {max_group}")
    elems = [u for u in units if u != 1 % modulus]
    if not elems:
        return 1
    order = len(units)
    memo: dict[tuple[frozenset, int], int] = {}

    def extend(products: frozenset, start: int) -> int:
        key = (products, start)
        hit = memo.get(key)
        if hit is not None:
            return hit
        most = 0
        for idx in range(start, len(elems)):
            g = elems[idx]
            new = products | {p * g % modulus for p in products} | {g}
            if 1 % modulus in new:
                continue
            if len(new) >= order - 1:  # any further element would close a product to 1
                most = max(most, 1)
                continue
            most = max(most, 1 + extend(frozenset(new), idx))
        memo[key] = most
        return most

    return extend(frozenset(), 0) + 1


def derive_target(L: int, M: int, a: int) -> ResidueTarget:
    """CRT-combine h = 1 mod L with h = a mod M."""
    if math.gcd(a, M) != 1:
        raise DomainError(f"residue {a} is not coprime to {M}")
    try:
        h, modulus = crt([(1, L), (a, M)])
    except CrtConflictError as e:
        raise InfeasibleError(
            f"no element is 1 mod {L} and {a} mod {M}: gcd({L}, {M}) does not divide {a - 1}"
        ) from e
    return ResidueTarget(h=h, modulus=modulus, mod_L=1 % L, mod_M=a % M)


def derive_target_exponent(p: int, L_fact: Factorization, M: int) -> int:
    """Least r >= 1 with r = 0 mod ord_L(p) and r = 1 mod phi(M)."""
    L = L_fact.value()
    if math.gcd(p, L) != 1:
        raise DomainError(f"gcd({p}, {L}) != 1")
    lam = carmichael_lambda(L_fact)
    order = multiplicative_order(p, L, factorize(lam))
    phi_M = euler_phi(factorize(M))
    g = math.gcd(order, phi_M)
    if g != 1:
        raise InfeasibleError(
            f"ord_L(p) = {order} shares factor {g} with phi(M) = {phi_M}; no exponent exists"
        )
    r, mod = crt([(0, order), (1, phi_M)])
    return r if r > 0 else r + mod


def _validate_pool(pool, modulus: int, min_size: int) -> list[int]:
    pool = [int(p) for p in pool]
    if min_size < 1:
        raise DomainError(f"min_size must be >= 1, got {min_size}")
    if modulus < 1:
        raise DomainError(f"modulus must be >= 1, got {modulus}")
    for p in pool:
        if math.gcd(p, modulus) != 1:
            raise DomainError(f"pool element {p} is not coprime to modulus {modulus}")
    return pool


def _find_mitm(pool, modulus, target, min_size, max_size):
    n = len(pool)
    nb = n // 2
    left, right = pool[: n - nb], pool[n - nb :]

    def mask_products(elems):
        prods = [1 % modulus] * (1 << len(elems))
        for i, e in enumerate(elems):
            e %= modulus
            half = 1 << i
            for j in range(half):
                prods[half + j] = prods[j] * e % modulus
        return prods

    right_prods = mask_products(right)
    table: dict[int, dict[int, int]] = {}
    for mask, pr in enumerate(right_prods):
        sizes = table.setdefault(pr, {})
        sz = mask.bit_count()
        if sz not in sizes:
            sizes[sz] = mask
    left_prods = mask_products(left)
    cap = max_size if max_size is not None else n
    for lmask, pr in enumerate(left_prods):
        sl = lmask.bit_count()
        if sl > cap:
            continue
        need = target * pow(pr, -1, modulus) % modulus
        sizes = table.get(need)
        if not sizes:
            continue
        for sr in sorted(sizes):
            if min_size <= sl + sr <= cap:
                rmask = sizes[sr]
                idx = [i for i in range(len(left)) if lmask >> i & 1]
                idx += [len(left) + i for i in range(len(right)) if rmask >> i & 1]
                return tuple(idx)
    return None


def _find_dp(pool, modulus, target, min_size, max_size):
    n = len(pool)
    if modulus >= _KERNEL_MOD_LIMIT:
        raise CapacityError(
            f"modulus {modulus} is too large for the residue DP; reduce the pool to <= {MITM_LIMIT}"
        )
    capped = max_size is None
    n_classes = (min_size if capped else max_size) + 1
    cells = (n + 1) * n_classes * modulus
    if cells > DP_CELL_BOUND:
        raise CapacityError(
            f"DP table would need {cells} cells (> {DP_CELL_BOUND}); reduce the pool"
        )
    res = np.array([p % modulus for p in pool], dtype=np.int64)
    inv = np.array([pow(int(r), -1, modulus) for r in res], dtype=np.int64)
    reach = _kernels.dp_reach(res, inv, modulus, n_classes, capped, 1 % modulus)
    top = n_classes - 1
    end_classes = [top] if capped else list(range(min_size, n_classes))
    end_c = next((c for c in end_classes if reach[n, c, target]), None)
    if end_c is None:
        return None
    taken = []
    c, r = end_c, target
    for i in range(n, 0, -1):
        if reach[i - 1, c, r]:
            continue
        r_prev = r * int(inv[i - 1]) % modulus
        cands = (c - 1, c) if (capped and c == top) else (c - 1,)
        for cp in cands:
            if cp >= 0 and reach[i - 1, cp, r_prev]:
                taken.append(i - 1)
                c, r = cp, r_prev
                break
        else:
            raise AssertionError("DP reconstruction lost the witness")
    return tuple(sorted(taken))


def subset_product_find(pool, modulus: int, target: int, min_size: int, max_size: int | None = None):
    """Indices of some subset of ``pool`` whose product is ``target`` mod
    ``modulus``, with min_size <= size <= max_size, or None if none exists.

    Complete: meet-in-the-middle for pools up to 40 elements, residue DP with
    witness reconstruction beyond that.
    """
    pool = _validate_pool(pool, modulus, min_size)
    if max_size is not None and max_size < min_size:
        raise DomainError(f"max_size {max_size} < min_size {min_size}")
    target %= modulus
    if len(pool) < min_size:
        return None
    if len(pool) <= MITM_LIMIT:
        return _find_mitm(pool, modulus, target, min_size, max_size)
    return _find_dp(pool, modulus, target, min_size, max_size)


def subset_product_enumerate(
    pool, modulus: int, target: int, min_size: int, max_size: int | None = None
) -> list[tuple[int, ...]]:
    """Every qualifying index subset, by full 2**n scan (n <= 24)."""
    pool = _validate_pool(pool, modulus, min_size)
    n = len(pool)
    if n > ENUMERATE_LIMIT:
        raise CapacityError(f"pool size {n} exceeds exhaustive-scan cap {ENUMERATE_LIMIT}")
    target %= modulus
    cap = max_size if max_size is not None else n
    out = []
    if n == 0:
        return out
    if modulus < _KERNEL_MOD_LIMIT:
        prods, sizes = _kernels.all_subset_products(
            np.array([p % modulus for p in pool], dtype=np.int64), modulus
        )
        masks = np.flatnonzero((prods == target) & (sizes >= min_size) & (sizes <= cap))
        mask_list = (int(m) for m in masks)
    else:
        prods = [1 % modulus] * (1 << n)
        for i, p in enumerate(pool):
            p %= modulus
            half = 1 << i
            for j in range(half):
                prods[half + j] = prods[j] * p % modulus
        mask_list = (
            m
            for m, pr in enumerate(prods)
            if pr == target and min_size <= m.bit_count() <= cap
        )
    for mask in mask_list:
        out.append(tuple(i for i in range(n) if mask >> i & 1))
    return out


@dataclass(frozen=True)
class SubsetCountBound:
    """Lower bound on the number of qualifying subsets, relaxed and exact forms."""

    log_bound: float  # natural log of the relaxed bound
    bound: float | None  # exp(log_bound) when representable as a float
    exact: Fraction | None  # C(P-n, t-n) / C(P, n) at integral n, t


def count_lower_bound(pool_size: int, n_bound: float, t: float) -> SubsetCountBound:
    """The binomial-quotient lower bound on subsets of size in (t-n, t].

    Relaxed form ((4/5)P/t)**((2/3)t) / ((3eP)/t)**(t/3) evaluated in log
    space; the exact binomial quotient is attached when ceil(n_bound) and
    floor(t) make it meaningful.
    """
    if t <= n_bound:
        raise OrderingError(
            f"lower ordering violated: t = {t} must exceed the identity-threshold bound {n_bound}"
        )
    if pool_size <= t:
        raise OrderingError(
            f"upper ordering violated: t = {t} must stay below the pool size {pool_size}"
        )
    log_bound = (2 / 3) * t * math.log(0.8 * pool_size / t) - (t / 3) * math.log(
        3 * math.e * pool_size / t
    )
    bound = math.exp(log_bound) if log_bound < 700 else None
    n_i = math.ceil(n_bound)
    t_i = math.floor(t)
    exact = None
    if n_i >= 0 and t_i > n_i and pool_size > t_i:
        exact = Fraction(math.comb(pool_size - n_i, t_i - n_i), math.comb(pool_size, n_i))
    return SubsetCountBound(log_bound=log_bound, bound=bound, exact=exact)


_CHECK_ORDER = ("composite", "squarefree", "korselt", "residue_class", "multiplier_congruence")


def assemble(subset, shared: AssemblySpec) -> CarmichaelCertificate:
    """Certify the product of ``subset`` as a Carmichael number in the class.

    Every check is recomputed from scratch (the subset itself is the
    factorization). Raises AssemblyError naming the first failed check; a
    certificate is only ever built fully verified.
    """
    primes = sorted(int(p) for p in subset)
    if len(primes) < 3:
        raise DomainError(f"need at least 3 primes, got {len(primes)}")
    if len(set(primes)) != len(primes):
        raise DomainError("subset primes must be distinct")
    for p in primes:
        if not is_prime(p):
            raise DomainError(f"{p} is not prime")
    n = 1
    for p in primes:
        n *= p
    results = {
        "composite": len(primes) >= 2,
        "squarefree": True,  # distinct primes by validation
        "korselt": all((n - 1) % (p - 1) == 0 for p in primes),
        "residue_class": n % shared.M == shared.a % shared.M,
    }
    if shared.mode == "agp":
        results["multiplier_congruence"] = (n - 1) % (shared.multiplier * shared.L) == 0
    elif shared.mode == "erdos":
        results["multiplier_congruence"] = (n - 1) % shared.multiplier == 0
    else:
        results["multiplier_congruence"] = True
    for name in _CHECK_ORDER:
        if not results[name]:
            raise AssemblyError(name, f"n = {n}")
    cert = CarmichaelCertificate(
        n=n,
        prime_factors=tuple(primes),
        mode=shared.mode,
        shared_multiplier=shared.multiplier,
        L=shared.L,
        M=shared.M,
        a=shared.a,
        checks={
            "composite": True,
            "squarefree": True,
            "korselt": True,
            "residue_class": True,
            "probabilistic_primality_used": any(p >= PROBABLE_PRIME_THRESHOLD for p in primes),
        },
    )
    # belt and braces: the korselt module must agree with its own entry point
    if not korselt_check(n, Factorization.of((p, 1) for p in primes)):
        raise AssemblyError("korselt", "re-verification disagreed")
    return cert
