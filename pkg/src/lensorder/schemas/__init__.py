"""JSON schemas for the serialized reports."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

import jsonschema

NAMES = ("homology_table", "squeeze_verdict", "residual_report")


@lru_cache(maxsize=None)
def load(name: str) -> dict:
    if name not in NAMES:
        raise KeyError(f"unknown schema {name!r}")
    return json.loads(resources.files(__package__).joinpath(f"{name}.json").read_text())


def validate(doc: dict, name: str) -> None:
    """Raise jsonschema.ValidationError when ``doc`` does not match the schema."""
    jsonschema.validate(doc, load(name))
