"""Independent checks for dominating pairs and decompositions.

The checks here avoid the code paths they validate: the sampled bound
check evaluates forms directly from their matrices instead of going
through :func:`~leftdecomp.forms.pair_check`, and the parallel-sum limit
check reaches the absolutely continuous part through the monotone
sequence ``S:(kW)`` rather than through square roots and projectors.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np

from .errors import InvalidInputError
from .forms import FormMatrix, LeftDecomposition, contraction_norm, parallel_sum
from .linalg_core import (
    DEFAULT_TOL,
    ToleranceContext,
    check_hermitian_psd,
    kernel_basis,
    min_eigenvalue,
    operator_norm,
    rank_threshold,
)

__all__ = [
    "CheckResult",
    "VerificationReport",
    "ORACLE_SCHEDULE",
    "ORACLE_GAP_REL",
    "CONDITION_LIMIT",
    "sample_bound_check",
    "parallel_sum_limit_check",
    "condition_estimate",
    "full_report",
]

ORACLE_SCHEDULE = tuple(10.0 ** e for e in range(9))
ORACLE_GAP_REL = 1e-4
CONDITION_LIMIT = 1e10


@dataclass
class CheckResult:
    """Outcome of one check.  ``passed`` is ``worst_residual <= tolerance``.

    An inconclusive check is reported but does not count as a failure.
    """

    name: str
    passed: bool
    worst_residual: float
    tolerance: float
    detail: str = ""
    inconclusive: bool = False
    witness: Optional[dict] = None

    @property
    def failed(self) -> bool:
        return not self.passed and not self.inconclusive

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class VerificationReport:
    checks: List[CheckResult] = field(default_factory=list)
    seed: int = 0
    samples: int = 0

    @property
    def ok(self) -> bool:
        return not any(c.failed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "seed": self.seed,
            "samples": self.samples,
            "checks": [c.to_dict() for c in self.checks],
        }


def _matrix(x, name):
    m = x.matrix if isinstance(x, FormMatrix) else np.asarray(x, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"{name}: expected a square matrix")
    return m


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def sample_bound_check(t, s1, s2, samples: int = 1000, seed: int = 0,
                       tol: ToleranceContext = DEFAULT_TOL, name: str = "sample_bound") -> CheckResult:
    """Test ``|t(f,g)| <= s1[f]^(1/2) s2[g]^(1/2)`` on random vector pairs.

    Each sample's violation is normalized by ``1 + ||f|| ||g||``, so the
    check passes when the worst normalized violation is at most ``cert_abs``.
    """
    M = _matrix(t, "t")
    M1 = _matrix(s1, "s1")
    M2 = _matrix(s2, "s2")
    if not (M.shape == M1.shape == M2.shape):
        raise InvalidInputError("t, s1 and s2 must have the same dimension")
    if samples < 1:
        raise InvalidInputError("samples must be at least 1")
    n = M.shape[0]
    rng = np.random.default_rng(seed)
    F = _complex_normal(rng, (samples, n))
    Gv = _complex_normal(rng, (samples, n))
    lhs = np.abs(np.einsum("si,ij,sj->s", F, M, Gv.conj()))
    q1 = np.einsum("si,ij,sj->s", F, M1, F.conj()).real
    q2 = np.einsum("si,ij,sj->s", Gv, M2, Gv.conj()).real
    rhs = np.sqrt(np.clip(q1, 0, None)) * np.sqrt(np.clip(q2, 0, None))
    scale = 1.0 + np.linalg.norm(F, axis=1) * np.linalg.norm(Gv, axis=1)
    violation = (lhs - rhs) / scale
    worst = int(np.argmax(violation))
    worst_value = float(violation[worst])
    passed = worst_value <= tol.cert_abs
    witness = None
    if not passed:
        witness = {
            "f": [[z.real, z.imag] for z in F[worst]],
            "g": [[z.real, z.imag] for z in Gv[worst]],
            "lhs": float(lhs[worst]),
            "rhs": float(rhs[worst]),
        }
    return CheckResult(
        name=name,
        passed=passed,
        worst_residual=worst_value,
        tolerance=tol.cert_abs,
        detail=f"{samples} samples, seed {seed}",
        witness=witness,
    )


def _positive_spectrum(a: np.ndarray, tol: ToleranceContext) -> np.ndarray:
    lam = np.linalg.eigvalsh(a)
    return lam[lam > rank_threshold(np.abs(lam), tol)]


def condition_estimate(S: np.ndarray, W: np.ndarray, tol: ToleranceContext = DEFAULT_TOL) -> float:
    """Conditioning of the limit ``S:(kW) -> S_a`` for action matrices.

    The larger of the spread of the nonzero spectrum of ``S + W`` and the
    ratio ``||S|| / lambda_min^+(W)``, which governs the ``O(1/k)`` rate.
    """
    total = _positive_spectrum(S + W, tol)
    if total.size == 0:
        return 1.0
    cond = float(total[-1] / total[0])
    w_pos = _positive_spectrum(W, tol)
    if w_pos.size:
        cond = max(cond, operator_norm(S) / float(w_pos[0]))
    return cond


def parallel_sum_limit_check(s, w, s_a, tol: ToleranceContext = DEFAULT_TOL,
                             name: str = "parallel_sum_limit") -> CheckResult:
    """Compare a claimed absolutely continuous part with the limit of ``S:(kW)``.

    Over ``k = 1, 10, ..., 1e8`` the sequence must increase in the PSD
    order, stay below ``s_a``, and end within ``1e-4 * max(1, ||S||)`` of it.
    The three conditions are folded into one normalized residual (tolerance
    1), with the raw numbers in ``detail``.
    """
    M_s = check_hermitian_psd(_matrix(s, "s"), tol, "s")
    M_w = check_hermitian_psd(_matrix(w, "w"), tol, "w")
    M_a = check_hermitian_psd(_matrix(s_a, "s_a"), tol, "s_a")
    if not (M_s.shape == M_w.shape == M_a.shape):
        raise InvalidInputError("s, w and s_a must have the same dimension")
    # Forms are stored transposed relative to their action; for Hermitian
    # matrices that is conjugation, which commutes with every step below.
    S, W, Sa = M_s.T, M_w.T, M_a.T
    scale = max(1.0, operator_norm(S))
    cond = condition_estimate(S, W, tol)

    seq = [parallel_sum(S.T, (k * W).T, tol).action for k in ORACLE_SCHEDULE]
    mono = max(max(0.0, -min_eigenvalue(b - a)) for a, b in zip(seq, seq[1:]))
    dom = max(max(0.0, -min_eigenvalue(Sa - p)) for p in seq)
    gap = operator_norm(seq[-1] - Sa)

    cert = tol.cert_abs * scale
    gap_tol = ORACLE_GAP_REL * scale
    worst = max(mono / cert, dom / cert, gap / gap_tol)
    inconclusive = cond > CONDITION_LIMIT
    return CheckResult(
        name=name,
        passed=worst <= 1.0,
        worst_residual=worst,
        tolerance=1.0,
        detail=(f"gap={gap:.3e} (tol {gap_tol:.1e}), monotonicity violation={mono:.3e}, "
                f"domination violation={dom:.3e} (tol {cert:.1e}), condition={cond:.3e}"),
        inconclusive=inconclusive,
    )


def full_report(t, w, dec: LeftDecomposition, seed: int = 0, tol: ToleranceContext = DEFAULT_TOL,
                samples: int = 1000) -> VerificationReport:
    """Run every certificate for a left decomposition of ``t`` against ``w``.

    Kernels are recomputed from the inputs rather than read from ``dec``,
    so a decomposition carrying wrong certificates is still caught.
    Failures are reported in the result, never raised.
    """
    G = _matrix(t, "t").T
    W = check_hermitian_psd(_matrix(w, "w"), tol, "w").T
    G_lr = dec.t_lr.action
    G_ls = dec.t_ls.action
    S2 = dec.pair.s2.action
    n = G.shape[0]
    g_scale = max(1.0, operator_norm(G))
    cert = tol.cert_abs * g_scale
    checks = []

    add = operator_norm(G_lr + G_ls - G)
    checks.append(CheckResult("additivity", add <= cert, add, cert, "||G_lr + G_ls - G||"))

    ker_w = kernel_basis(W, tol)
    incl = operator_norm(G_lr @ ker_w.vectors) if ker_w.count else 0.0
    checks.append(CheckResult("kernel_inclusion", incl <= cert, incl, cert,
                              f"||G_lr K_W|| over {ker_w.count} kernel vectors of w"))

    ker_ls = kernel_basis(G_ls, tol)
    family = np.hstack([ker_w.vectors, ker_ls.vectors])
    sv = np.linalg.svd(family, compute_uv=False) if family.shape[1] else np.zeros(0)
    sum_dim = int(np.count_nonzero(sv > rank_threshold(sv, tol)))
    checks.append(CheckResult("kernel_sum_dimension", sum_dim == n, float(n - sum_dim), 0.0,
                              f"dim(ker w + ker t_ls) = {sum_dim} of {n}"))

    sa, ss = dec.sigma_a.action, dec.sigma_s.action
    s1 = dec.pair.s1.action
    split = operator_norm(sa + ss - s1)
    s_cert = tol.cert_abs * max(1.0, operator_norm(s1))
    checks.append(CheckResult("sigma_additivity", split <= s_cert, split, s_cert, "||sigma_a + sigma_s - s1||"))

    for label, part, sigma in (("regular", G_lr, sa), ("singular", G_ls, ss)):
        norm = contraction_norm(sigma, part, S2, tol)
        checks.append(CheckResult(f"bound_norm_{label}", norm <= 1 + tol.cert_abs, norm, 1 + tol.cert_abs,
                                  f"||(S2^1/2)^+ G_{label[0]} (sigma^1/2)^+||"))

    checks.append(sample_bound_check(t, dec.pair.s1, dec.pair.s2, samples, seed, tol, "sample_bound_pair"))
    checks.append(sample_bound_check(dec.t_lr, dec.sigma_a, dec.pair.s2, samples, seed + 1, tol,
                                     "sample_bound_regular"))
    checks.append(sample_bound_check(dec.t_ls, dec.sigma_s, dec.pair.s2, samples, seed + 2, tol,
                                     "sample_bound_singular"))
    checks.append(parallel_sum_limit_check(dec.pair.s1, w, dec.sigma_a, tol, "parallel_sum_limit"))

    checks.sort(key=lambda c: c.name)
    return VerificationReport(checks=checks, seed=seed, samples=samples)
