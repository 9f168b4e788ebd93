"""Dense complex linear algebra with an explicit tolerance policy.

Every rank decision in the package goes through :func:`numerical_rank`,
which treats a singular value ``s`` of ``A`` as zero iff
``s <= rank_rel * max(1, s_max(A))``.  Nothing here reads a global
tolerance; callers pass a :class:`ToleranceContext`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, ValidationError

__all__ = [
    "ToleranceContext",
    "DEFAULT_TOL",
    "SubspaceBasis",
    "SubspaceRelation",
    "as_matrix",
    "as_vector",
    "rank_threshold",
    "numerical_rank",
    "kernel_basis",
    "range_basis",
    "psd_sqrt",
    "pinv",
    "operator_norm",
    "projector_onto",
    "subspace_relation",
    "hermitian_part",
    "check_hermitian_psd",
    "min_eigenvalue",
]


@dataclass(frozen=True)
class ToleranceContext:
    """Thresholds used for rank decisions and certificate residuals.

    Parameters
    ----------
    rank_rel : float
        Relative threshold for deciding that a singular value is zero.
    cert_abs : float
        Absolute threshold for certificate residuals (kernel inclusion,
        additivity, norm bounds, Hermitian/PSD checks).
    """

    rank_rel: float = 1e-12
    cert_abs: float = 1e-9

    def __post_init__(self):
        for name in ("rank_rel", "cert_abs"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be a positive finite number, got {value!r}")

    def replace(self, **changes) -> "ToleranceContext":
        values = {"rank_rel": self.rank_rel, "cert_abs": self.cert_abs}
        values.update({k: v for k, v in changes.items() if v is not None})
        return ToleranceContext(**values)


DEFAULT_TOL = ToleranceContext()


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D complex array (a fresh copy)."""
    try:
        arr = np.array(a, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name}: cannot convert to a complex matrix ({exc})") from None
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name}: expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: entries must be finite")
    return arr


def as_vector(v, name: str = "vector") -> np.ndarray:
    try:
        arr = np.array(v, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"{name}: cannot convert to a complex vector ({exc})") from None
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidInputError(f"{name}: expected a non-empty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name}: entries must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis of a subspace of ``C^ambient_dim``.

    ``vectors`` has shape ``(ambient_dim, count)``; columns are the basis
    vectors.  An empty basis has ``count == 0``.
    """

    ambient_dim: int
    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        vecs = np.array(self.vectors, dtype=complex).reshape(self.ambient_dim, -1)
        if vecs.shape[1] > self.ambient_dim:
            raise InvalidInputError("more basis vectors than the ambient dimension")
        vecs.setflags(write=False)
        object.__setattr__(self, "vectors", vecs)

    @property
    def count(self) -> int:
        return self.vectors.shape[1]

    @property
    def dim(self) -> int:
        return self.count

    @classmethod
    def empty(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(ambient_dim, np.zeros((ambient_dim, 0), dtype=complex))

    @classmethod
    def from_vectors(cls, vectors, tol: ToleranceContext = DEFAULT_TOL) -> "SubspaceBasis":
        """Orthonormalize the columns of ``vectors`` (rank-revealing)."""
        vecs = np.atleast_2d(np.asarray(vectors, dtype=complex))
        if not np.all(np.isfinite(vecs)):
            raise InvalidInputError("basis vectors must be finite")
        return range_basis(vecs, tol)

    def __repr__(self):
        return f"SubspaceBasis(ambient_dim={self.ambient_dim}, count={self.count})"


@dataclass(frozen=True)
class SubspaceRelation:
    contains: bool
    sum_dim: int
    worst_residual: float


def rank_threshold(singular_values: np.ndarray, tol: ToleranceContext) -> float:
    s_max = float(singular_values.max()) if singular_values.size else 0.0
    return tol.rank_rel * max(1.0, s_max)


def numerical_rank(a, tol: ToleranceContext = DEFAULT_TOL) -> int:
    a = as_matrix(a)
    s = np.linalg.svd(a, compute_uv=False)
    return int(np.count_nonzero(s > rank_threshold(s, tol)))


def kernel_basis(a, tol: ToleranceContext = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of the numerical right null space of ``a``.

    Examples
    --------
    >>> kernel_basis(np.diag([1.0, 0.0])).vectors.real
    array([[0.],
           [1.]])
    """
    a = as_matrix(a, "A")
    _, s, vh = np.linalg.svd(a)
    rank = int(np.count_nonzero(s > rank_threshold(s, tol)))
    return SubspaceBasis(a.shape[1], vh[rank:].conj().T)


def range_basis(a, tol: ToleranceContext = DEFAULT_TOL) -> SubspaceBasis:
    """Orthonormal basis of the numerical column space of ``a``."""
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    if a.shape[1] == 0:
        return SubspaceBasis.empty(a.shape[0])
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    rank = int(np.count_nonzero(s > rank_threshold(s, tol)))
    return SubspaceBasis(a.shape[0], u[:, :rank])


def hermitian_part(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def min_eigenvalue(a) -> float:
    """Smallest eigenvalue of the Hermitian part of ``a``."""
    return float(np.linalg.eigvalsh(hermitian_part(np.asarray(a, dtype=complex)))[0])


def check_hermitian_psd(s, tol: ToleranceContext = DEFAULT_TOL, name: str = "S") -> np.ndarray:
    """Validate that ``s`` is Hermitian PSD and return its Hermitian part.

    Both tests are scaled by ``max(1, ||S||)`` so that rounding in large
    Gram matrices is not mistaken for indefiniteness.
    """
    s = as_matrix(s, name)
    if s.shape[0] != s.shape[1]:
        raise InvalidInputError(f"{name}: expected a square matrix, got shape {s.shape}")
    scale = max(1.0, float(np.abs(s).max()) * s.shape[0])
    asym = float(np.abs(s - s.conj().T).max())
    if asym > tol.cert_abs * scale:
        raise ValidationError(f"{name}: not Hermitian (max |S - S*| = {asym:.3e})")
    h = hermitian_part(s)
    lam_min = float(np.linalg.eigvalsh(h)[0])
    if lam_min < -tol.cert_abs * scale:
        raise ValidationError(f"{name}: not positive semidefinite (min eigenvalue {lam_min:.3e})")
    return h


def psd_sqrt(s, tol: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """Hermitian PSD square root with ``ran(R) == ran(S)`` numerically.

    Eigenvalues at or below the rank threshold (which includes the small
    negatives left by rounding) are set to zero before taking roots.

    Raises
    ------
    ValidationError
        If ``s`` is not Hermitian, or has an eigenvalue below ``-cert_abs``.
    """
    h = check_hermitian_psd(s, tol)
    lam, vec = np.linalg.eigh(h)
    cut = rank_threshold(np.abs(lam), tol)
    root = np.where(lam > cut, np.sqrt(np.clip(lam, 0.0, None)), 0.0)
    r = (vec * root) @ vec.conj().T
    return hermitian_part(r)


def pinv(a, tol: ToleranceContext = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudo-inverse with thresholded singular values."""
    a = as_matrix(a, "A")
    u, s, vh = np.linalg.svd(a, full_matrices=False)
    keep = s > rank_threshold(s, tol)
    inv_s = np.zeros_like(s)
    inv_s[keep] = 1.0 / s[keep]
    return (vh.conj().T * inv_s) @ u.conj().T


def operator_norm(a) -> float:
    """Spectral norm (largest singular value)."""
    a = as_matrix(a, "A")
    return float(np.linalg.svd(a, compute_uv=False)[0])


def projector_onto(span: SubspaceBasis) -> np.ndarray:
    """Orthogonal projector ``V V*`` onto an orthonormal span."""
    v = np.asarray(span.vectors)
    if v.ndim != 2 or v.shape[0] != span.ambient_dim:
        raise InvalidInputError("basis vectors do not match the ambient dimension")
    return v @ v.conj().T


def subspace_relation(b1: SubspaceBasis, b2: SubspaceBasis, tol: ToleranceContext = DEFAULT_TOL) -> SubspaceRelation:
    """Decide ``span(b1) <= span(b2)`` and compute ``dim(span(b1) + span(b2))``.

    Inclusion holds when every vector of ``b1`` has residual
    ``||(I - P2) v|| <= cert_abs``.
    """
    if b1.ambient_dim != b2.ambient_dim:
        raise InvalidInputError(f"ambient dimensions differ: {b1.ambient_dim} vs {b2.ambient_dim}")
    n = b1.ambient_dim
    if b1.count:
        resid = b1.vectors - projector_onto(b2) @ b1.vectors
        worst = float(np.linalg.norm(resid, axis=0).max())
    else:
        worst = 0.0
    family = np.hstack([b1.vectors, b2.vectors])
    if family.shape[1] == 0:
        sum_dim = 0
    else:
        s = np.linalg.svd(family.reshape(n, -1), compute_uv=False)
        sum_dim = int(np.count_nonzero(s > rank_threshold(s, tol)))
    return SubspaceRelation(contains=worst <= tol.cert_abs, sum_dim=sum_dim, worst_residual=worst)
