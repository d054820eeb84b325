"""Numerical tolerances and run configuration.

Every geometric predicate in the package takes its thresholds from a
:class:`Tolerances` instance.  The process-wide default can be overridden
through environment variables named ``POLYFOLD_TOL_<NAME>`` (for example
``POLYFOLD_TOL_PT=1e-8``) or replaced with :func:`set_default_tolerances`.
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from typing import Mapping

ENV_PREFIX = "POLYFOLD_TOL_"


@dataclass(frozen=True)
class Tolerances:
    pt: float = 1e-9       # point identity
    rad: float = 1e-9      # radius ties
    ang: float = 1e-9      # angle-sequence entry ties
    slack: float = 1e-9    # strict interior / sliver cells
    rank: float = 1e-10    # rank tests
    kkt: float = 1e-8      # projection optimality
    int: float = 1e-9      # full-dimensionality of the input

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if not value > 0:
                raise ValueError(f"tolerance {f.name} must be positive, got {value!r}")

    def replace(self, **changes: float) -> "Tolerances":
        return dataclasses.replace(self, **changes)

    @classmethod
    def from_mapping(cls, values: Mapping[str, object], base: "Tolerances | None" = None) -> "Tolerances":
        base = base or cls()
        names = {f.name for f in dataclasses.fields(cls)}
        changes = {}
        for key, value in values.items():
            k = key.lower().removeprefix("eps_").removeprefix("ε_")
            if k not in names:
                raise KeyError(f"unknown tolerance {key!r}")
            changes[k] = float(value)
        return base.replace(**changes)

    @classmethod
    def from_env(cls, environ: Mapping[str, str] | None = None) -> "Tolerances":
        environ = os.environ if environ is None else environ
        values = {k[len(ENV_PREFIX):]: v for k, v in environ.items() if k.startswith(ENV_PREFIX)}
        return cls.from_mapping(values)


_default = Tolerances.from_env()


def default_tolerances() -> Tolerances:
    return _default


def set_default_tolerances(tol: Tolerances) -> None:
    global _default
    _default = tol


def resolve(tol: Tolerances | None) -> Tolerances:
    return _default if tol is None else tol


@dataclass
class RunConfig:
    """Settings for one command-line invocation."""

    tol: Tolerances = field(default_factory=default_tolerances)
    max_events: int = 1_000_000
    seed: int = 0
    outputs: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.max_events < 1:
            raise ValueError("iteration cap must be at least 1")
