"""Loading the text formats from disk or from the bundled data directory.

References inside files are paths relative to the referencing file.  A path
that does not exist on disk is looked up in the bundled data directory,
first as given and then by its trailing components, so that
``examples/subsingleton.model`` and ``corpus/dtt.lfsig`` resolve to the
bundled copies.
"""
from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from .dfib import DFib, parse_dfib
from .fincat import FinCat, parse_fincat

DATA = Path(__file__).resolve().parent / "data"


class InputError(Exception):
    """A referenced file is missing or has an unknown kind."""


def locate(path: str | Path, relative_to: Path | None = None) -> Path:
    p = Path(path)
    candidates = []
    if relative_to is not None and not p.is_absolute():
        candidates.append(relative_to / p)
    candidates.append(p)
    parts = p.parts
    for k in range(len(parts)):
        candidates.append(DATA.joinpath(*parts[k:]))
    candidates.append(DATA / "models" / p.name)
    for c in candidates:
        if c.is_file():
            return c.resolve()
    raise InputError(f"file not found: {path}")


@lru_cache(maxsize=None)
def _load_fincat(path: Path) -> FinCat:
    return parse_fincat(path.read_text(encoding="utf-8"), name=path.stem)


@lru_cache(maxsize=None)
def _load_rmcat(path: Path):
    from .rmcat import parse_rmcat

    return parse_rmcat(path.read_text(encoding="utf-8"), lambda ref: load_fincat(ref, path.parent))


def load_fincat(path, relative_to: Path | None = None) -> FinCat:
    return _load_fincat(locate(path, relative_to))


def load_rmcat(path, relative_to: Path | None = None):
    return _load_rmcat(locate(path, relative_to))


def load_dfib(path, relative_to: Path | None = None) -> DFib:
    p = locate(path, relative_to)
    return parse_dfib(p.read_text(encoding="utf-8"), lambda ref: load_fincat(ref, p.parent))


def load_theory(path, relative_to: Path | None = None):
    from .rmcat import parse_theory

    p = locate(path, relative_to)
    return parse_theory(p.read_text(encoding="utf-8"), lambda ref: load_rmcat(ref, p.parent))


def load_model(path, relative_to: Path | None = None):
    """Parse a ``.model`` file; the result is not yet validated."""
    from .model import parse_model

    p = locate(path, relative_to)

    def dfib_ref(ref, base):
        q = locate(ref, p.parent)
        return parse_dfib(q.read_text(encoding="utf-8"), lambda _ref: base)

    return parse_model(
        p.read_text(encoding="utf-8"),
        lambda ref: load_fincat(ref, p.parent),
        lambda ref: load_rmcat(ref, p.parent),
        dfib_ref,
    )


def bundled_theories() -> dict:
    return {p.stem: load_rmcat(p) for p in sorted((DATA / "theories").glob("*.rmcat"))}


def bundled_models(theory_stem: str) -> list:
    """Bundled models whose file name starts with ``<theory_stem>_``."""
    return [load_model(p) for p in sorted((DATA / "models").glob(f"{theory_stem}_*.model"))]
