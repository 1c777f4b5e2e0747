"""A small zoo of named finite categories used by generators and tests."""
from __future__ import annotations

from functools import lru_cache

from .fincat import (
    FinCat,
    discrete,
    parallel_pair,
    terminal_category,
    walking_arrow,
    walking_cospan,
    walking_iso,
    walking_span,
)


def chain(n: int) -> FinCat:
    """The total order ``0 < 1 < ... < n-1``."""
    return FinCat.from_poset(list(range(n)), lambda a, b: a <= b, name=f"chain{n}")


def boolean_lattice(atoms: int = 2) -> FinCat:
    """Subsets of an ``atoms``-element set ordered by inclusion; objects are bit strings."""
    elems = ["".join(bits) for bits in _bitstrings(atoms)]
    return FinCat.from_poset(elems, lambda a, b: all(x <= y for x, y in zip(a, b)), name=f"bool{atoms}")


def _bitstrings(n: int):
    if n == 0:
        yield ()
        return
    for rest in _bitstrings(n - 1):
        yield ("0",) + rest
    for rest in _bitstrings(n - 1):
        yield ("1",) + rest


def divisors(n: int) -> FinCat:
    ds = [d for d in range(1, n + 1) if n % d == 0]
    return FinCat.from_poset(ds, lambda a, b: b % a == 0, name=f"div{n}")


def cyclic_group(n: int) -> FinCat:
    return FinCat.from_monoid(list(range(n)), 0, lambda g, f: (g + f) % n, name=f"Z{n}")


def idempotent() -> FinCat:
    return FinCat.from_monoid(["1", "e"], "1", lambda g, f: "e" if "e" in (g, f) else "1", name="idem")


def vee() -> FinCat:
    """``l <- s -> r``: the meet-semilattice with a bottom and two maximal elements."""
    return FinCat.from_poset(["s", "l", "r"], lambda a, b: a == b or a == "s", name="vee")


def arrow_with_flip() -> FinCat:
    """``0 -> 1`` with an involution ``s`` on ``1``; ``Hom(0, 1) = {f, sf}``."""
    return FinCat.build(
        [0, 1],
        {"f": (0, 1), "sf": (0, 1), "s": (1, 1)},
        {("s", "f"): "sf", ("s", "sf"): "f", ("s", "s"): ("id", 1)},
        name="arrow-flip",
    )


def symmetric_categories() -> list[FinCat]:
    """Catalog entries with non-identity automorphisms."""
    return [cyclic_group(2), cyclic_group(3), walking_iso(), arrow_with_flip()]


def small_categories() -> list[FinCat]:
    return list(_small())


@lru_cache(maxsize=None)
def _small() -> tuple:
    return (
        terminal_category(),
        walking_arrow(),
        discrete(["p", "q"]),
        walking_cospan(),
        walking_span(),
        walking_iso(),
        parallel_pair(),
        chain(3),
        boolean_lattice(2),
        cyclic_group(2),
        idempotent(),
        vee(),
        arrow_with_flip(),
        cyclic_group(3),
    )


def cartesian_categories() -> list[FinCat]:
    """Catalog entries with all finite limits."""
    return list(_cartesian())


@lru_cache(maxsize=None)
def _cartesian() -> tuple:
    return (terminal_category(), walking_arrow(), chain(3), boolean_lattice(2), walking_iso())
