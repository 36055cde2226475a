"""Exception hierarchy shared across the package."""


class CarmkitError(Exception):
    """Base class for all library errors."""


class DomainError(CarmkitError, ValueError):
    """An argument is outside an operation's stated domain."""


class CapacityError(CarmkitError):
    """A request exceeds a declared size cap (sieve window, pool, DP table)."""


class UnfactoredError(CarmkitError):
    """Factoring budget ran out; carries the unfactored cofactor."""

    def __init__(self, cofactor: int, message: str | None = None):
        self.cofactor = cofactor
        super().__init__(message or f"work budget exhausted; unfactored cofactor {cofactor}")


class CrtConflictError(DomainError):
    """An inconsistent congruence system; names the offending pair."""

    def __init__(self, pair_a: tuple[int, int], pair_b: tuple[int, int]):
        self.pair_a = pair_a
        self.pair_b = pair_b
        super().__init__(
            f"incompatible congruences: x ≡ {pair_a[0]} (mod {pair_a[1]}) "
            f"vs x ≡ {pair_b[0]} (mod {pair_b[1]})"
        )


class ConstructionError(CarmkitError):
    """A construction stage produced nothing usable."""


class InfeasibleError(ConstructionError):
    """The requested residue target cannot exist for these parameters."""


class OrderingError(DomainError):
    """Quantities violate a required strict ordering; message names the side."""


class AssemblyError(CarmkitError):
    """A candidate product failed certification; carries the failed check."""

    def __init__(self, check: str, detail: str = ""):
        self.check = check
        super().__init__(f"certificate check failed: {check}" + (f" ({detail})" if detail else ""))
