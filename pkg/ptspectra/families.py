"""Model families: one interface the scan engine drives for every model.

A family knows how to build its truncated matrix at a coupling and a
truncation size, which unperturbed levels exist (with their labels), what
"doubling the truncation" means for it and which couplings are admissible.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import Any, List, Optional, Tuple

import numpy as np

from ptspectra.closed_forms import TwoLevelDetuned, TwoLevelGainCoupling
from ptspectra.errors import InvalidInputError
from ptspectra.hamiltonians import (
    ModelH2,
    ModelH3,
    build_detuned,
    build_gain_coupling,
    build_h2,
    build_h3,
    validate_h3_eps,
)
from ptspectra.models import Label, TruncatedHamiltonian

Size = Any  # int for one-dimensional bases, (N1, N2) for H2, 2 for two-level models


class SpectralFamily(ABC):
    """Adapter between a model and the continuation machinery."""

    name: str = ""
    default_size: Size = None

    @abstractmethod
    def build(self, eps: float, size: Size) -> TruncatedHamiltonian:
        ...

    @abstractmethod
    def unperturbed_levels(self, size: Size) -> List[Tuple[Label, float]]:
        """``(label, energy)`` pairs sorted by energy, then label."""

    @abstractmethod
    def doubled(self, size: Size) -> Size:
        ...

    def validate_eps(self, eps: float) -> None:
        if not math.isfinite(eps):
            raise InvalidInputError(f"eps must be finite, got {eps!r}")

    def normalize_size(self, size: Optional[Size]) -> Size:
        return self.default_size if size is None else size

    def truncation_of(self, size: Size) -> Tuple[int, ...]:
        return tuple(size) if isinstance(size, (tuple, list)) else (int(size),)

    def describe(self) -> dict:
        return {"model": self.name}


class H3Family(SpectralFamily):
    name = "H3"
    default_size = 128

    def __init__(self, quad_order: Optional[int] = None) -> None:
        self.model = ModelH3(quad_order)

    @property
    def quad_order(self) -> Optional[int]:
        return self.model.quad_order

    def build(self, eps: float, size: Size) -> TruncatedHamiltonian:
        return build_h3(eps, int(size), self.model.quad_order)

    def unperturbed_levels(self, size: Size) -> List[Tuple[Label, float]]:
        return [((n,), 2.0 * n + 1.0) for n in range(int(size))]

    def doubled(self, size: Size) -> Size:
        return 2 * int(size)

    def normalize_size(self, size: Optional[Size]) -> Size:
        size = self.default_size if size is None else size
        if int(size) != size or size < 1:
            raise InvalidInputError(f"H3 truncation must be a positive integer, got {size!r}")
        return int(size)

    def validate_eps(self, eps: float) -> None:
        validate_h3_eps(eps)

    def describe(self) -> dict:
        return {"model": self.name, "quad_order": self.quad_order}


class H2Family(SpectralFamily):
    """Doubling multiplies the basis dimension by two: each axis grows by sqrt(2)."""

    name = "H2"
    default_size = (32, 32)

    def __init__(self, model: ModelH2) -> None:
        self.model = model

    def build(self, eps: float, size: Size) -> TruncatedHamiltonian:
        n1, n2 = size
        return build_h2(self.model, eps, int(n1), int(n2))

    def unperturbed_levels(self, size: Size) -> List[Tuple[Label, float]]:
        n1, n2 = size
        w1, w2 = self.model.omega1, self.model.omega2
        levels = [
            ((a, b), (2 * a + 1) * w1 + (2 * b + 1) * w2)
            for a in range(int(n1))
            for b in range(int(n2))
        ]
        levels.sort(key=lambda item: (item[1], item[0]))
        return levels

    def doubled(self, size: Size) -> Size:
        return tuple(int(math.ceil(math.sqrt(2.0) * n)) for n in size)

    def normalize_size(self, size: Optional[Size]) -> Size:
        size = self.default_size if size is None else size
        if isinstance(size, int):
            size = (size, size)
        size = tuple(size)
        if len(size) != 2 or any(int(n) != n or n < 1 for n in size):
            raise InvalidInputError(f"H2 truncation must be two positive integers, got {size!r}")
        return (int(size[0]), int(size[1]))

    def describe(self) -> dict:
        m = self.model
        return {
            "model": self.name,
            "omega1": m.omega1,
            "omega2": m.omega2,
            "r": m.r,
            "s": m.s,
            "parity_operator": m.parity_operator,
            "odd_total_degree": m.odd_total_degree,
            "non_resonant": m.non_resonant,
        }


class _TwoLevelFamily(SpectralFamily):
    default_size = 2

    def doubled(self, size: Size) -> Size:
        return 2

    def normalize_size(self, size: Optional[Size]) -> Size:
        return 2

    def unperturbed_levels(self, size: Size) -> List[Tuple[Label, float]]:
        diag = self.build(0.0, 2).unperturbed
        order = np.argsort(diag, kind="stable")
        return [((k,), float(diag[i])) for k, i in enumerate(order)]


class GainCouplingFamily(_TwoLevelFamily):
    name = "gain"

    def __init__(self, e1: float, e2: float) -> None:
        self.params = TwoLevelGainCoupling(e1, e2, 0.0)

    def build(self, eps: float, size: Size = 2) -> TruncatedHamiltonian:
        return build_gain_coupling(self.params, eps)

    def describe(self) -> dict:
        return {"model": self.name, "e1": self.params.e1, "e2": self.params.e2}


class DetunedFamily(_TwoLevelFamily):
    name = "detuned"

    def __init__(self, e: float, b: float) -> None:
        self.params = TwoLevelDetuned(e, b, 0.0)

    def build(self, eps: float, size: Size = 2) -> TruncatedHamiltonian:
        return build_detuned(self.params, eps)

    def describe(self) -> dict:
        return {"model": self.name, "e": self.params.e, "b": self.params.b}


def continuity_defect(family: SpectralFamily, eps: float, size: Size, k: int) -> float:
    """Largest ``|(M(eps) - M(0)) e_j|`` over the first *k* basis vectors."""
    size = family.normalize_size(size)
    diff = np.asarray(family.build(eps, size).matrix) - np.asarray(family.build(0.0, size).matrix)
    k = max(1, min(int(k), diff.shape[1]))
    return float(np.max(np.linalg.norm(diff[:, :k], axis=0)))
