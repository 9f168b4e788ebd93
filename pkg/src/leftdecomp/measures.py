"""Finitely supported complex measures and the forms they induce.

On a finite set of atoms every function is simple, and the form induced by
``mu`` is diagonal in the basis of atom indicators:
``t(chi_i, chi_j) = mu(atom_i & atom_j) = delta_ij * mu_i``.

Weights are data, not computed quantities, so the support of ``nu`` is
decided exactly (``nu_i > 0``) with no tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np

from .errors import InvalidInputError, ValidationError
from .forms import FormMatrix, NonnegativeForm

__all__ = [
    "AtomicMeasure",
    "MeasureDecomposition",
    "lebesgue_decompose_measure",
    "radon_nikodym",
    "total_variation",
    "induced_form",
    "is_abs_continuous_measure",
    "is_singular_measure",
]


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """Complex weights on an ordered list of uniquely labelled atoms."""

    atoms: tuple
    weights: np.ndarray

    def __post_init__(self):
        atoms = tuple(str(a) for a in self.atoms)
        if len(set(atoms)) != len(atoms):
            raise InvalidInputError("atom labels must be unique")
        w = np.array(self.weights, dtype=complex).reshape(-1)
        if w.shape[0] != len(atoms):
            raise InvalidInputError(f"{len(atoms)} atoms but {w.shape[0]} weights")
        if not np.all(np.isfinite(w)):
            raise InvalidInputError("measure weights must be finite")
        w.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_mapping(cls, weights: Dict[str, complex]) -> "AtomicMeasure":
        return cls(tuple(weights), list(weights.values()))

    def __len__(self):
        return len(self.atoms)

    def __call__(self, subset: Sequence[str]) -> complex:
        """Measure of a set of atoms."""
        index = {a: i for i, a in enumerate(self.atoms)}
        return complex(sum(self.weights[index[a]] for a in set(subset)))

    def __add__(self, other: "AtomicMeasure") -> "AtomicMeasure":
        _require_same_atoms(self, other)
        return AtomicMeasure(self.atoms, self.weights + other.weights)

    @property
    def is_nonnegative(self) -> bool:
        return bool(np.all(self.weights.imag == 0) and np.all(self.weights.real >= 0))

    def as_dict(self) -> Dict[str, complex]:
        return {a: complex(w) for a, w in zip(self.atoms, self.weights)}


@dataclass(frozen=True, eq=False)
class MeasureDecomposition:
    """``mu = mu_a + mu_s`` with ``mu_a << nu`` and ``mu_s`` carried off ``support``."""

    mu_a: AtomicMeasure
    mu_s: AtomicMeasure
    support: tuple


def _require_same_atoms(a: AtomicMeasure, b: AtomicMeasure):
    if a.atoms != b.atoms:
        raise InvalidInputError("measures are defined on different atom lists")


def _support_mask(mu: AtomicMeasure, nu: AtomicMeasure) -> np.ndarray:
    _require_same_atoms(mu, nu)
    if not nu.is_nonnegative:
        raise ValidationError("nu must have non-negative real weights")
    return nu.weights.real > 0


def lebesgue_decompose_measure(mu: AtomicMeasure, nu: AtomicMeasure, tol=None) -> MeasureDecomposition:
    """Split ``mu`` along the support ``E = {i : nu_i > 0}``.

    ``tol`` is accepted for interface symmetry and ignored: the split is
    exact.
    """
    on = _support_mask(mu, nu)
    zero = np.zeros_like(mu.weights)
    mu_a = AtomicMeasure(mu.atoms, np.where(on, mu.weights, zero))
    mu_s = AtomicMeasure(mu.atoms, np.where(on, zero, mu.weights))
    support = tuple(a for a, keep in zip(mu.atoms, on) if keep)
    return MeasureDecomposition(mu_a=mu_a, mu_s=mu_s, support=support)


def radon_nikodym(mu: AtomicMeasure, nu: AtomicMeasure, tol=None) -> Dict[str, complex]:
    """Density ``h = d mu_a / d nu`` on the support of ``nu``.

    Atoms outside the support are omitted.
    """
    on = _support_mask(mu, nu)
    return {
        a: complex(m.real / v.real, m.imag / v.real)
        for a, m, v, keep in zip(mu.atoms, mu.weights, nu.weights, on)
        if keep
    }


def total_variation(mu: AtomicMeasure) -> AtomicMeasure:
    """Atomwise modulus ``|mu|``."""
    return AtomicMeasure(mu.atoms, np.abs(mu.weights).astype(complex))


def induced_form(mu: AtomicMeasure) -> FormMatrix:
    """Diagonal form ``diag(mu_i)``; a :class:`NonnegativeForm` when ``mu >= 0``."""
    m = np.diag(mu.weights)
    return NonnegativeForm(m) if mu.is_nonnegative else FormMatrix(m)


def is_abs_continuous_measure(mu: AtomicMeasure, nu: AtomicMeasure) -> bool:
    """``nu_i = 0`` implies ``mu_i = 0``."""
    on = _support_mask(mu, nu)
    return bool(np.all(mu.weights[~on] == 0))


def is_singular_measure(mu: AtomicMeasure, nu: AtomicMeasure) -> bool:
    """``mu`` is carried by the complement of the support of ``nu``."""
    on = _support_mask(mu, nu)
    return bool(np.all(mu.weights[on] == 0))
