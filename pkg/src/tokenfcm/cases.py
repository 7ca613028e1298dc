"""Bundled case-study model files."""

from __future__ import annotations

from importlib import resources

from .modelfile import ModelDocument, parse_model_file

_FILES = {
    "diesel": "diesel_engine.yaml",
    "diesel-published-rpn": "diesel_engine_published_rpn.yaml",
}


def case_path(name: str):
    """Filesystem path of a bundled model file."""
    try:
        filename = _FILES[name]
    except KeyError:
        raise KeyError(f"unknown case {name!r}; available: {sorted(_FILES)}") from None
    return resources.files("tokenfcm") / "data" / filename


def load_case(name: str) -> ModelDocument:
    return parse_model_file(case_path(name).read_text(encoding="utf-8"))


def diesel(published_rpn: bool = False) -> ModelDocument:
    """Diesel engine case: expert tallies, or the published RPNs as initial values."""
    return load_case("diesel-published-rpn" if published_rpn else "diesel")
