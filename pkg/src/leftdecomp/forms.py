"""Sesquilinear forms on C^n and their one-sided Lebesgue decomposition.

Matrix convention
-----------------
A form ``t`` is stored as the matrix ``M`` with ``M[i, j] = t(e_i, e_j)``,
the way such matrices are usually displayed.  Algorithms work with the
*action matrix* ``G = M.T``, for which

    t(f, g) = <G f, g> = conj(g) @ G @ f,        ker(t) = null(G).

For a non-negative form the action matrix ``S`` is Hermitian PSD and
``s[f] = ||S^{1/2} f||^2``, so the Hilbert space completion of the
quotient by ``ker(s)`` is realized as ``ran(S^{1/2})`` with the map
``f -> S^{1/2} f``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidInputError, NumericalFailure, PreconditionError
from .linalg_core import (
    DEFAULT_TOL,
    SubspaceBasis,
    ToleranceContext,
    as_matrix,
    as_vector,
    check_hermitian_psd,
    hermitian_part,
    kernel_basis,
    operator_norm,
    pinv,
    projector_onto,
    psd_sqrt,
    range_basis,
    rank_threshold,
    subspace_relation,
)

__all__ = [
    "FormMatrix",
    "NonnegativeForm",
    "DominatingPair",
    "LeftDecomposition",
    "FormParts",
    "PSDDecomposition",
    "DefaultPairs",
    "PairCheck",
    "MlCheck",
    "Classification",
    "Witness",
    "kernel_of_form",
    "decompose_parts",
    "is_abs_continuous",
    "is_singular",
    "lebesgue_decompose_psd",
    "parallel_sum",
    "contraction_norm",
    "default_pairs",
    "pair_check",
    "ml_check",
    "left_decompose",
    "left_decompose_default",
    "classify_left",
    "singular_witness",
]


@dataclass(frozen=True, eq=False)
class FormMatrix:
    """A sesquilinear form on ``C^n`` given by ``matrix[i, j] = t(e_i, e_j)``."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix, "form matrix")
        if m.shape[0] != m.shape[1]:
            raise InvalidInputError(f"form matrix must be square, got shape {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_action(cls, g) -> "FormMatrix":
        return cls(np.asarray(g).T)

    @classmethod
    def zeros(cls, n: int) -> "FormMatrix":
        return cls(np.zeros((n, n), dtype=complex))

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def action(self) -> np.ndarray:
        """Action matrix ``G = M.T`` with ``t(f, g) = <G f, g>``."""
        return self.matrix.T

    def __call__(self, f, g) -> complex:
        return complex(np.asarray(f) @ self.matrix @ np.conj(g))

    def quadratic(self, f) -> complex:
        """``t[f] = t(f, f)``."""
        return self(f, f)

    def adjoint(self) -> "FormMatrix":
        return FormMatrix(self.matrix.conj().T)

    def __add__(self, other: "FormMatrix") -> "FormMatrix":
        return FormMatrix(self.matrix + other.matrix)

    def __sub__(self, other: "FormMatrix") -> "FormMatrix":
        return FormMatrix(self.matrix - other.matrix)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n})"


class NonnegativeForm(FormMatrix):
    """A form whose matrix is Hermitian PSD.

    Construction only checks shape and finiteness; use :meth:`checked` (or
    any operation taking a non-negative form) to validate positivity under a
    given tolerance.
    """

    @classmethod
    def checked(cls, matrix, tol: ToleranceContext = DEFAULT_TOL, name: str = "form") -> "NonnegativeForm":
        m = matrix.matrix if isinstance(matrix, FormMatrix) else matrix
        return cls(check_hermitian_psd(m, tol, name))

    @classmethod
    def identity(cls, n: int, scale: float = 1.0) -> "NonnegativeForm":
        return cls(scale * np.eye(n, dtype=complex))


@dataclass(frozen=True, eq=False)
class DominatingPair:
    """``(s1, s2)`` with ``|t(f,g)| <= s1[f]^(1/2) s2[g]^(1/2)``."""

    s1: NonnegativeForm
    s2: NonnegativeForm
    contraction_norm: float


@dataclass(frozen=True, eq=False)
class LeftDecomposition:
    """``t = t_lr + t_ls`` with the certificates produced while building it.

    ``bound_norms`` holds the contraction norms certifying
    ``|t_lr(f,g)| <= sigma_a[f]^(1/2) s2[g]^(1/2)`` and the analogous bound
    for ``t_ls`` with ``sigma_s``.
    """

    t_lr: FormMatrix
    t_ls: FormMatrix
    sigma_a: NonnegativeForm
    sigma_s: NonnegativeForm
    pair: DominatingPair
    ker_w: SubspaceBasis
    ker_lr: SubspaceBasis
    ker_ls: SubspaceBasis
    bound_norms: tuple = field(default=(0.0, 0.0))


@dataclass(frozen=True, eq=False)
class FormParts:
    adjoint: FormMatrix
    real_part: FormMatrix
    imag_part: FormMatrix


@dataclass(frozen=True, eq=False)
class PSDDecomposition:
    s_a: NonnegativeForm
    s_s: NonnegativeForm


@dataclass(frozen=True, eq=False)
class DefaultPairs:
    identity_pair: DominatingPair
    polar_pair: DominatingPair


@dataclass(frozen=True)
class PairCheck:
    ok: bool
    contraction_norm: float
    left_kernel_ok: bool = True
    right_kernel_ok: bool = True


@dataclass(frozen=True)
class MlCheck:
    member: bool
    companion_scale: float


@dataclass(frozen=True)
class Classification:
    left_regular: bool
    left_strongly_singular: bool
    left_bounded: bool
    minimal_C: Optional[float]


@dataclass(frozen=True, eq=False)
class Witness:
    u: np.ndarray
    v: np.ndarray
    residual: float


# -- coercion helpers -------------------------------------------------------

def _form(t, name: str = "t") -> FormMatrix:
    if isinstance(t, FormMatrix):
        return t
    try:
        return FormMatrix(t)
    except InvalidInputError as exc:
        raise InvalidInputError(f"{name}: {exc}") from None


def _psd_action(s, tol: ToleranceContext, name: str) -> np.ndarray:
    m = s.matrix if isinstance(s, FormMatrix) else s
    return check_hermitian_psd(np.asarray(m).T, tol, name)


def _same_dim(*mats: np.ndarray):
    dims = {m.shape[0] for m in mats}
    if len(dims) != 1:
        raise InvalidInputError(f"dimension mismatch: {sorted(dims)}")


def _nonneg_from_action(s: np.ndarray) -> NonnegativeForm:
    return NonnegativeForm(hermitian_part(s).T)


# -- elementary operations -----------------------------------------------

def kernel_of_form(t, tol: ToleranceContext = DEFAULT_TOL) -> SubspaceBasis:
    """``ker(t) = {f : t(f, g) = 0 for all g}``."""
    return kernel_basis(_form(t).action, tol)


def decompose_parts(t) -> FormParts:
    """Adjoint, real part ``(t + t*)/2`` and imaginary part ``(t - t*)/(2i)``."""
    m = _form(t).matrix
    adj = m.conj().T
    return FormParts(
        adjoint=FormMatrix(adj),
        real_part=FormMatrix((m + adj) / 2),
        imag_part=FormMatrix((m - adj) / 2j),
    )


def is_abs_continuous(s, w, tol: ToleranceContext = DEFAULT_TOL) -> bool:
    """``s << w``, i.e. ``ker(w) <= ker(s)`` in finite dimension."""
    S = _psd_action(s, tol, "s")
    W = _psd_action(w, tol, "w")
    _same_dim(S, W)
    return subspace_relation(kernel_basis(W, tol), kernel_basis(S, tol), tol).contains


def is_singular(s, w, tol: ToleranceContext = DEFAULT_TOL) -> bool:
    """``s`` is ``w``-singular iff ``ker(s) + ker(w) = C^n``."""
    S = _psd_action(s, tol, "s")
    W = _psd_action(w, tol, "w")
    _same_dim(S, W)
    rel = subspace_relation(kernel_basis(S, tol), kernel_basis(W, tol), tol)
    return rel.sum_dim == S.shape[0]


def _split_projector(R: np.ndarray, W: np.ndarray, tol: ToleranceContext):
    """Projector onto ``span(R ker(W))`` plus the kernel basis of ``W``."""
    ker_w = kernel_basis(W, tol)
    image = range_basis(R @ ker_w.vectors, tol) if ker_w.count else SubspaceBasis.empty(W.shape[0])
    return projector_onto(image), ker_w


def lebesgue_decompose_psd(s, w, tol: ToleranceContext = DEFAULT_TOL) -> PSDDecomposition:
    """Classical decomposition ``s = s_a + s_s`` relative to ``w``.

    With ``R = S^{1/2}`` and ``Q`` the projector onto ``R ker(W)``:
    ``s_s = R Q R`` and ``s_a = R (I - Q) R``.
    """
    S = _psd_action(s, tol, "s")
    W = _psd_action(w, tol, "w")
    _same_dim(S, W)
    R = psd_sqrt(S, tol)
    Q, _ = _split_projector(R, W, tol)
    s_s = R @ Q @ R
    s_a = R @ (np.eye(S.shape[0]) - Q) @ R
    return PSDDecomposition(s_a=_nonneg_from_action(s_a), s_s=_nonneg_from_action(s_s))


def parallel_sum(a, b, tol: ToleranceContext = DEFAULT_TOL) -> NonnegativeForm:
    """Parallel sum ``A:B = A (A+B)^+ B`` of two PSD forms.

    Evaluated as ``A - A (A+B)^- A`` with a block generalized inverse taken
    in the eigenbasis of ``B``.  The two expressions agree for PSD pairs, and
    the block form stays accurate when ``B`` is many orders of magnitude
    larger than ``A`` (the regime of the limit ``A:(kB)`` as ``k`` grows).
    """
    A = _psd_action(a, tol, "a")
    B = _psd_action(b, tol, "b")
    _same_dim(A, B)
    n = A.shape[0]
    lam, U = np.linalg.eigh(B)
    keep = lam > rank_threshold(np.abs(lam), tol)
    r = int(keep.sum())
    if r == 0:
        return NonnegativeForm(np.zeros((n, n), dtype=complex))
    U = np.hstack([U[:, keep], U[:, ~keep]])
    At = U.conj().T @ A @ U
    X = At[:r, :r] + np.diag(lam[keep])
    Xi = np.linalg.inv(hermitian_part(X))
    A12 = At[:r, r:]
    C = hermitian_part(At[r:, r:] - A12.conj().T @ Xi @ A12)
    Cp = pinv(C, tol) if r < n else C
    H = np.zeros((n, n), dtype=complex)
    H[:r, :r] = Xi + Xi @ A12 @ Cp @ A12.conj().T @ Xi
    H[:r, r:] = -Xi @ A12 @ Cp
    H[r:, :r] = H[:r, r:].conj().T
    H[r:, r:] = Cp
    P = U @ (At - At @ H @ At) @ U.conj().T
    return _nonneg_from_action(P)


# -- dominating pairs -------------------------------------------------------

def contraction_norm(S1: np.ndarray, G: np.ndarray, S2: np.ndarray, tol: ToleranceContext = DEFAULT_TOL) -> float:
    """``||(S2^{1/2})^+ G (S1^{1/2})^+||`` for action matrices."""
    left = pinv(psd_sqrt(S2, tol), tol)
    right = pinv(psd_sqrt(S1, tol), tol)
    return operator_norm(left @ G @ right)


def _pair_from_actions(S1, S2, G, tol) -> DominatingPair:
    return DominatingPair(
        s1=_nonneg_from_action(S1),
        s2=_nonneg_from_action(S2),
        contraction_norm=contraction_norm(S1, G, S2, tol),
    )


def default_pairs(t, tol: ToleranceContext = DEFAULT_TOL) -> DefaultPairs:
    """Two canonical dominating pairs for ``t``.

    * identity pair ``(||G|| I, ||G|| I)``;
    * polar pair ``(|G|, |G*|)`` from ``G = U |G|``.  ``|G|`` and ``|G*|``
      are assembled from one SVD of ``G`` rather than by square-rooting
      ``G*G``, which would square the conditioning.
    """
    t = _form(t)
    G = t.action
    n = t.n
    c = operator_norm(G)
    eye = np.eye(n, dtype=complex)
    identity_pair = _pair_from_actions(c * eye, c * eye, G, tol)

    u, s, vh = np.linalg.svd(G)
    s = np.where(s > rank_threshold(s, tol), s, 0.0)
    abs_g = (vh.conj().T * s) @ vh
    abs_g_star = (u * s) @ u.conj().T
    polar_pair = _pair_from_actions(hermitian_part(abs_g), hermitian_part(abs_g_star), G, tol)
    return DefaultPairs(identity_pair=identity_pair, polar_pair=polar_pair)


def pair_check(s1, s2, t, tol: ToleranceContext = DEFAULT_TOL) -> PairCheck:
    """Check that ``(s1, s2)`` dominates ``t`` on both sides.

    The inequality ``|t(f,g)| <= s1[f]^(1/2) s2[g]^(1/2)`` holds iff
    ``ker S1 <= ker G``, ``ker S2 <= ker G*`` and the contraction norm is
    at most one.
    """
    S1 = _psd_action(s1, tol, "s1")
    S2 = _psd_action(s2, tol, "s2")
    G = _form(t).action
    _same_dim(S1, S2, G)
    left = subspace_relation(kernel_basis(S1, tol), kernel_basis(G, tol), tol).contains
    right = subspace_relation(kernel_basis(S2, tol), kernel_basis(G.conj().T, tol), tol).contains
    norm = contraction_norm(S1, G, S2, tol)
    ok = left and right and norm <= 1 + tol.cert_abs
    return PairCheck(ok=ok, contraction_norm=norm, left_kernel_ok=left, right_kernel_ok=right)


def ml_check(s1, t, tol: ToleranceContext = DEFAULT_TOL) -> MlCheck:
    """Is ``s1`` usable as the left factor for ``t``?

    When it is, ``s2 = companion_scale * I`` completes the pair, with
    ``companion_scale = ||G (S1^{1/2})^+||^2``.
    """
    S1 = _psd_action(s1, tol, "s1")
    G = _form(t).action
    _same_dim(S1, G)
    member = subspace_relation(kernel_basis(S1, tol), kernel_basis(G, tol), tol).contains
    scale = operator_norm(G @ pinv(psd_sqrt(S1, tol), tol)) ** 2
    return MlCheck(member=member, companion_scale=scale)


# -- the left decomposition ----------------------------------------------

def left_decompose(t, w, pair: DominatingPair, tol: ToleranceContext = DEFAULT_TOL) -> LeftDecomposition:
    """Split ``t`` into a ``w``-left regular and a ``w``-left strongly singular part.

    The left factor ``S1`` of ``pair`` is decomposed classically against
    ``w``; with ``R1 = S1^{1/2}`` and ``Q`` the projector onto
    ``R1 ker(W)`` the parts are::

        G_lr = G R1^+ (I - Q) R1,      G_ls = G R1^+ Q R1.

    Raises
    ------
    PreconditionError
        If ``pair`` does not dominate ``t``.
    """
    t = _form(t)
    G = t.action
    W = _psd_action(w, tol, "w")
    S1 = _psd_action(pair.s1, tol, "s1")
    S2 = _psd_action(pair.s2, tol, "s2")
    _same_dim(G, W, S1, S2)
    check = pair_check(pair.s1, pair.s2, t, tol)
    if not check.ok:
        raise PreconditionError(
            f"pair does not dominate t (contraction norm {check.contraction_norm:.6g}, "
            f"left kernel ok={check.left_kernel_ok}, right kernel ok={check.right_kernel_ok})"
        )
    n = t.n
    R1 = psd_sqrt(S1, tol)
    R1p = pinv(R1, tol)
    Q, ker_w = _split_projector(R1, W, tol)
    comp = np.eye(n) - Q
    G_lr = G @ R1p @ comp @ R1
    G_ls = G @ R1p @ Q @ R1
    sigma_a = hermitian_part(R1 @ comp @ R1)
    sigma_s = hermitian_part(R1 @ Q @ R1)
    bounds = (contraction_norm(sigma_a, G_lr, S2, tol), contraction_norm(sigma_s, G_ls, S2, tol))
    return LeftDecomposition(
        t_lr=FormMatrix.from_action(G_lr),
        t_ls=FormMatrix.from_action(G_ls),
        sigma_a=_nonneg_from_action(sigma_a),
        sigma_s=_nonneg_from_action(sigma_s),
        pair=DominatingPair(pair.s1, pair.s2, check.contraction_norm),
        ker_w=ker_w,
        ker_lr=kernel_basis(G_lr, tol),
        ker_ls=kernel_basis(G_ls, tol),
        bound_norms=bounds,
    )


def left_decompose_default(t, w, tol: ToleranceContext = DEFAULT_TOL) -> LeftDecomposition:
    """Left decomposition for the identity pair, in closed form.

    ``t_lr(f, g) = t(P f, g)`` and ``t_ls(f, g) = t((I - P) f, g)`` where
    ``P`` projects onto ``ker(w)^perp``.
    """
    t = _form(t)
    G = t.action
    W = _psd_action(w, tol, "w")
    _same_dim(G, W)
    n = t.n
    ker_w = kernel_basis(W, tol)
    P = np.eye(n) - projector_onto(ker_w)
    G_lr = G @ P
    G_ls = G @ (np.eye(n) - P)
    c = operator_norm(G)
    eye = c * np.eye(n, dtype=complex)
    pair = DominatingPair(_nonneg_from_action(eye), _nonneg_from_action(eye), 1.0 if c > 0 else 0.0)
    sigma_a = c * P
    sigma_s = c * (np.eye(n) - P)
    bounds = (contraction_norm(sigma_a, G_lr, eye, tol), contraction_norm(sigma_s, G_ls, eye, tol))
    return LeftDecomposition(
        t_lr=FormMatrix.from_action(G_lr),
        t_ls=FormMatrix.from_action(G_ls),
        sigma_a=_nonneg_from_action(sigma_a),
        sigma_s=_nonneg_from_action(sigma_s),
        pair=pair,
        ker_w=ker_w,
        ker_lr=kernel_basis(G_lr, tol),
        ker_ls=kernel_basis(G_ls, tol),
        bound_norms=bounds,
    )


def classify_left(t, w, tol: ToleranceContext = DEFAULT_TOL) -> Classification:
    """Left regularity / left strong singularity of ``t`` with respect to ``w``.

    In ``C^n``, left bounded, left regular and ``ker(w) <= ker(t)`` coincide,
    and left strong singularity means ``ker(w) + ker(t) = C^n``.  For a left
    bounded form ``minimal_C`` is the least ``C`` with
    ``|t(f,g)| <= C w[f]^(1/2) ||g||``.
    """
    G = _form(t).action
    W = _psd_action(w, tol, "w")
    _same_dim(G, W)
    rel = subspace_relation(kernel_basis(W, tol), kernel_basis(G, tol), tol)
    regular = rel.contains
    minimal_c = operator_norm(G @ pinv(psd_sqrt(W, tol), tol)) if regular else None
    return Classification(
        left_regular=regular,
        left_strongly_singular=rel.sum_dim == G.shape[0],
        left_bounded=regular,
        minimal_C=minimal_c,
    )


def singular_witness(t, w, f, tol: ToleranceContext = DEFAULT_TOL) -> Witness:
    """Split ``f = u + v`` with ``u in ker(w)`` and ``v in ker(t)``.

    Then ``w[u] = 0`` and ``t(f - u, g) = 0`` for every ``g``.
    """
    G = _form(t).action
    W = _psd_action(w, tol, "w")
    f = as_vector(f, "f")
    _same_dim(G, W)
    if f.shape[0] != G.shape[0]:
        raise InvalidInputError(f"vector has length {f.shape[0]}, expected {G.shape[0]}")
    ker_w = kernel_basis(W, tol)
    ker_t = kernel_basis(G, tol)
    rel = subspace_relation(ker_w, ker_t, tol)
    if rel.sum_dim != G.shape[0]:
        raise PreconditionError("t is not left strongly singular with respect to w")
    basis = np.hstack([ker_w.vectors, ker_t.vectors])
    coef, *_ = np.linalg.lstsq(basis, f, rcond=None)
    u = ker_w.vectors @ coef[: ker_w.count]
    v = ker_t.vectors @ coef[ker_w.count:]
    residual = float(np.linalg.norm(f - u - v))
    if residual > tol.cert_abs * max(1.0, float(np.linalg.norm(f))):
        raise NumericalFailure(f"witness residual {residual:.3e} exceeds tolerance")
    return Witness(u=u, v=v, residual=residual)
