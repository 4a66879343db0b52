"""Stripping the discrimination-irrelevant subspace and the quantum-filter case.

If Q_j is the largest projector sitting below both M_j and N_j, the subspace
P = sum_j Q_j contributes nothing to telling the devices apart: optimal tests
can be chosen with normalization supported on I - P, and the problem is
equivalent to discriminating the compressed measurements
M~_j = (I - P) M_j (I - P) on the smaller space. For a pair of quantum
filters sharing their rank-one outcome this collapses d dimensions down to
the two spanned by the defining vectors, i.e. to a projective qubit pair.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .measurements import Povm, validate_povm
from .perfect import PerfectWitness
from .testers import Tester, make_tester


@dataclass(frozen=True, eq=False)
class ReductionResult:
    q_projectors: tuple[np.ndarray, ...]
    p_projector: np.ndarray
    reduced_dim: int
    embedding: np.ndarray | None  # d x reduced_dim isometry, columns span range(I - P)
    reduced_pair: tuple[Povm, Povm] | None
    identical_on_support: bool  # P = I: every test performs as chance


def _orthonormal_complement_basis(p: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Deterministic orthonormal basis of range(I - P), Gram-Schmidt over e_1, e_2, ..."""
    d = p.shape[0]
    comp = np.eye(d) - p
    cols: list[np.ndarray] = []
    for i in range(d):
        v = comp[:, i].astype(complex)
        for c in cols:
            v = v - c * np.vdot(c, v)
        nrm = float(np.linalg.norm(v))
        if nrm > tol:
            cols.append(v / nrm)
    if not cols:
        return np.zeros((d, 0), dtype=complex)
    return np.column_stack(cols)


def reduce_pair(m: Povm, n: Povm) -> ReductionResult:
    """Identify and remove the subspace irrelevant for discriminating m and n.

    Q_j is computed as the intersection of the eigenvalue-1 eigenspaces of
    M_j and N_j (for effects bounded by I, that is the largest projector
    below both). Performance of any test is preserved when the problem is
    restricted to range(I - sum_j Q_j).
    """
    if m.n_outcomes != n.n_outcomes or m.dim != n.dim:
        raise ValueError("measurements must share outcomes and dimension")
    d = m.dim
    qs = []
    for e, g in zip(m.effects, n.effects):
        q = linalg.subspace_intersection(
            linalg.eigenspace_projector(e, 1.0), linalg.eigenspace_projector(g, 1.0)
        )
        qs.append(q)
    p = sum(qs)
    rank_p = int(round(float(np.trace(p).real)))
    reduced_dim = d - rank_p
    if reduced_dim == 0:
        return ReductionResult(tuple(qs), p, 0, None, None, True)
    v = _orthonormal_complement_basis(p)
    if v.shape[1] != reduced_dim:
        raise RuntimeError("complement basis size disagrees with projector rank")
    m_red = validate_povm([v.conj().T @ e @ v for e in m.effects])
    n_red = validate_povm([v.conj().T @ e @ v for e in n.effects])
    return ReductionResult(tuple(qs), p, reduced_dim, v, (m_red, n_red), False)


def make_filter_pair(phi: np.ndarray, psi: np.ndarray) -> tuple[Povm, Povm]:
    """Two filters sharing the rank-one outcome: {|phi><phi|, I - .} vs {|psi><psi|, I - .}."""
    phi = linalg.require_state_vector(phi)
    psi = linalg.require_state_vector(psi)
    d = phi.size
    m = validate_povm([linalg.proj(phi), np.eye(d) - linalg.proj(phi)])
    n = validate_povm([linalg.proj(psi), np.eye(d) - linalg.proj(psi)])
    return m, n


def make_opposite_filter_pair(phi: np.ndarray, psi: np.ndarray) -> tuple[Povm, Povm]:
    """Filters whose rank-one projections sit on different outcome labels."""
    phi = linalg.require_state_vector(phi)
    psi = linalg.require_state_vector(psi)
    d = phi.size
    m = validate_povm([linalg.proj(phi), np.eye(d) - linalg.proj(phi)])
    n = validate_povm([np.eye(d) - linalg.proj(psi), linalg.proj(psi)])
    return m, n


@dataclass(frozen=True, eq=False)
class FilterReduction:
    phi_reduced: np.ndarray  # (1, 0) by construction
    psi_reduced: np.ndarray  # (F, sqrt(1 - F^2)) with the original overlap F
    embedding: np.ndarray  # d x 2 isometry onto span{phi, psi}
    reduced_pair: tuple[Povm, Povm]


def reduce_filters(phi: np.ndarray, psi: np.ndarray) -> FilterReduction:
    """Compress a same-outcome filter pair onto span{phi, psi}.

    Gram-Schmidt over (phi, psi) gives a two-dimensional frame in which the
    pair becomes the projective qubit measurements defined by (1, 0) and
    (F, sqrt(1 - F^2)); the overlap |<phi|psi>| is preserved exactly.
    """
    phi = linalg.require_state_vector(phi)
    psi = linalg.require_state_vector(psi)
    if phi.size != psi.size:
        raise ValueError("vectors must share their dimension")
    ov = np.vdot(phi, psi)
    f = abs(ov)
    if f > 1.0 - 1e-12:
        raise ValueError("parallel defining vectors give identical filters")
    psi_aligned = psi * (np.exp(-1j * np.angle(ov)) if f > 1e-14 else 1.0)
    w = psi_aligned - f * phi
    b2 = w / np.linalg.norm(w)
    v = np.column_stack([phi, b2])
    phi2 = np.array([1.0, 0.0], dtype=complex)
    psi2 = np.array([f, np.sqrt(max(0.0, 1.0 - f * f))], dtype=complex)
    m_red = validate_povm([linalg.proj(phi2), np.eye(2) - linalg.proj(phi2)])
    n_red = validate_povm([linalg.proj(psi2), np.eye(2) - linalg.proj(psi2)])
    return FilterReduction(phi2, psi2, v, (m_red, n_red))


def opposite_filters_witness(phi: np.ndarray, psi: np.ndarray) -> PerfectWitness | None:
    """Perfect discrimination of opposite-outcome filters whenever span{phi, psi} != C^d.

    Any probe orthogonal to both vectors triggers outcome 2 with certainty on
    the first device and outcome 1 on the second, so d >= 3 always works. In
    dimension 2 no such probe exists and the qubit treatment applies instead.
    """
    phi = linalg.require_state_vector(phi)
    psi = linalg.require_state_vector(psi)
    d = phi.size
    span = np.column_stack([phi, psi])
    # orthonormal basis of the orthogonal complement of the span
    q, _ = np.linalg.qr(span, mode="complete")
    rank = np.linalg.matrix_rank(span, tol=1e-10)
    if rank >= d:
        return None
    chi = linalg.canonical_phase(q[:, rank])
    resid = max(abs(np.vdot(phi, chi)), abs(np.vdot(psi, chi)))
    if resid > 1e-9:
        raise RuntimeError("complement vector construction failed")
    return PerfectWitness(chi, certainty_outcome=1, identified=("N", "M"))


def lift_tester(t_reduced: Tester, r: ReductionResult) -> Tester:
    """Embed a tester for the reduced pair back into the original space.

    Blocks are conjugated by the embedding isometry, so the lifted
    normalization is supported on range(I - P): probes never enter the
    irrelevant subspace, and every conditional probability on the original
    pair equals the reduced one.
    """
    if r.reduced_dim == 0:
        raise ValueError("nothing to lift: the pair is identical on its support")
    if t_reduced.dim != r.reduced_dim:
        raise ValueError(
            f"tester dimension {t_reduced.dim} != reduced dimension {r.reduced_dim}"
        )
    v = r.embedding
    blocks = {
        c: [v @ h @ v.conj().T for h in t_reduced.blocks[c]]
        for c in t_reduced.conclusions
    }
    return make_tester(blocks, rho=v @ t_reduced.rho @ v.conj().T)
