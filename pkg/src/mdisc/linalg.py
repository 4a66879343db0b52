"""Dense complex linear algebra for small operators (dim <= ~16).

Everything here is a thin, validated layer over LAPACK (numpy.linalg).
Operators are plain complex ndarrays; pure states are 1-D unit vectors.
All functions are pure and never mutate their inputs.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

HERMITICITY_TOL = 1e-10
RANK_TOL = 1e-7  # eigenvalue tolerance for rank decisions, relative to operator norm


class EigenDecomposition(NamedTuple):
    """Spectral decomposition of a Hermitian operator.

    ``values`` ascending, ``vectors`` orthonormal columns, A @ V = V @ diag(values).
    """

    values: np.ndarray
    vectors: np.ndarray


def asoperator(a) -> np.ndarray:
    """Coerce to a 2-D complex array and check finiteness."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got ndim={m.ndim}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def is_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    a = asoperator(a)
    if a.shape[0] != a.shape[1]:
        return False
    return float(np.max(np.abs(a - a.conj().T))) <= tol


def require_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Return the Hermitian part of ``a`` after checking the deviation is within tol."""
    a = asoperator(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"operator must be square, got shape {a.shape}")
    dev = float(np.max(np.abs(a - a.conj().T)))
    if dev > tol:
        raise ValueError(f"operator is not Hermitian: max |A - A^dag| = {dev:.3e} > {tol:g}")
    return (a + a.conj().T) / 2


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Tensor (Kronecker) product."""
    return np.kron(asoperator(a), asoperator(b))


def partial_trace(m: np.ndarray, dims: tuple[int, int], keep: int) -> np.ndarray:
    """Trace out one factor of an operator on a bipartite space.

    Parameters
    ----------
    m : operator on the composite space, side dims[0] * dims[1]
    dims : (dA, dB) subsystem dimensions
    keep : 0 to keep the A factor, 1 to keep B
    """
    m = asoperator(m)
    da, db = dims
    if m.shape != (da * db, da * db):
        raise ValueError(f"operator side {m.shape[0]} does not match dims {da}x{db}")
    if keep not in (0, 1):
        raise ValueError("keep must be 0 or 1")
    t = m.reshape(da, db, da, db)
    return np.einsum("abcb->ac", t) if keep == 0 else np.einsum("abad->bd", t)


def hermitian_eig(h: np.ndarray, tol: float = HERMITICITY_TOL) -> EigenDecomposition:
    """Spectral decomposition of a Hermitian operator (eigenvalues ascending)."""
    h = require_hermitian(h, tol)
    w, v = np.linalg.eigh(h)
    return EigenDecomposition(w, v)


def trace_norm(a: np.ndarray) -> float:
    """Sum of singular values, ||A||_1 = tr |A|."""
    a = asoperator(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("trace norm expects a square matrix")
    return float(np.linalg.svd(a, compute_uv=False).sum())


def sqrt_psd(h: np.ndarray, neg_tol: float = 1e-10) -> np.ndarray:
    """Positive square root of a PSD Hermitian operator.

    Eigenvalues in [-neg_tol, 0) are clamped to 0; anything more negative
    is rejected so that round-off is absorbed but genuinely indefinite
    inputs abort.
    """
    w, v = hermitian_eig(h)
    if w[0] < -neg_tol:
        raise ValueError(f"operator is not PSD: most negative eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def eigenspace_projector(h: np.ndarray, target: float, tol: float = RANK_TOL) -> np.ndarray:
    """Orthogonal projector onto the span of eigenvectors with |eig - target| <= tol.

    The tolerance is taken relative to max(1, spectral radius). An empty
    eigenspace yields the zero matrix.
    """
    w, v = hermitian_eig(h)
    scale = max(1.0, float(np.max(np.abs(w))) if w.size else 1.0)
    sel = np.abs(w - target) <= tol * scale
    if not np.any(sel):
        return np.zeros_like(np.asarray(h, dtype=complex))
    vs = v[:, sel]
    return vs @ vs.conj().T


def is_projector(p: np.ndarray, tol: float = 1e-9) -> bool:
    p = asoperator(p)
    return (
        p.shape[0] == p.shape[1]
        and is_hermitian(p, tol)
        and float(np.max(np.abs(p @ p - p))) <= tol
    )


def subspace_intersection(p: np.ndarray, q: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Projector onto range(p) & range(q).

    Computed from the eigenvalue-2 eigenspace of p + q: a unit vector is in
    both ranges iff (p + q) v = 2 v.
    """
    if not is_projector(p) or not is_projector(q):
        raise ValueError("subspace_intersection expects orthogonal projectors")
    w, v = hermitian_eig(p + q, tol=1e-8)
    sel = np.abs(w - 2.0) <= tol
    if not np.any(sel):
        return np.zeros_like(asoperator(p))
    vs = v[:, sel]
    return vs @ vs.conj().T


# -- small state helpers used throughout the package ------------------------


def normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    n = float(np.linalg.norm(v))
    if n == 0.0:
        raise ValueError("cannot normalize the zero vector")
    return v / n


def canonical_phase(v: np.ndarray) -> np.ndarray:
    """Rescale a vector's global phase so its first nonzero amplitude is real positive."""
    v = np.asarray(v, dtype=complex).ravel()
    for x in v:
        if abs(x) > 1e-14:
            return v * (abs(x) / x)
    return v


def proj(v: np.ndarray) -> np.ndarray:
    """Rank-one projector |v><v| for a unit vector v."""
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def require_state_vector(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    if abs(float(np.linalg.norm(v)) - 1.0) > tol:
        raise ValueError(f"state vector is not normalized: |v| = {np.linalg.norm(v):.12g}")
    return v


def require_density(rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Check rho is a density operator (Hermitian, PSD within tol, unit trace)."""
    rho = require_hermitian(rho, tol)
    w = np.linalg.eigvalsh(rho)
    if w[0] < -tol:
        raise ValueError(f"density operator not PSD: min eigenvalue {w[0]:.3e}")
    tr = float(np.trace(rho).real)
    if abs(tr - 1.0) > max(tol, 1e-9):
        raise ValueError(f"density operator trace {tr:.12g} != 1")
    return rho
