"""POVM data model, canonical measurement families, Choi form and the universal NOT.

A measurement with outcomes j = 1..n on a d-dimensional system is stored as a
:class:`Povm`: a tuple of PSD effects summing to the identity. The module also
provides every concrete family used elsewhere (projective qubit pairs, noisy
mixtures, trines, the perfectly distinguishable m-of-n family) plus JSON I/O.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg

POVM_TOL = 1e-9


class PovmValidationError(ValueError):
    """Base class for POVM validation failures. ``violation`` holds the worst magnitude."""

    def __init__(self, message: str, violation: float):
        super().__init__(message)
        self.violation = float(violation)


class NotHermitianError(PovmValidationError):
    pass


class NotPositiveError(PovmValidationError):
    pass


class NotCompleteError(PovmValidationError):
    pass


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Povm:
    """An n-outcome measurement: effects M_j >= 0 with sum_j M_j = I."""

    effects: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    @property
    def n_outcomes(self) -> int:
        return len(self.effects)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        return apply(self, rho)

    def choi(self) -> "ChoiOperator":
        return choi(self)


def validate_povm(raw: Sequence[np.ndarray], tol: float = POVM_TOL) -> Povm:
    """Validate a list of matrices as a POVM and return the frozen :class:`Povm`.

    Raises :class:`NotHermitianError`, :class:`NotPositiveError` or
    :class:`NotCompleteError` reporting the worst violation magnitude.
    """
    if len(raw) == 0:
        raise ValueError("a POVM needs at least one effect")
    mats = [linalg.asoperator(e) for e in raw]
    d = mats[0].shape[0]
    for j, e in enumerate(mats):
        if e.shape != (d, d):
            raise ValueError(f"effect {j} has shape {e.shape}, expected ({d}, {d})")
        dev = float(np.max(np.abs(e - e.conj().T)))
        if dev > tol:
            raise NotHermitianError(f"effect {j} not Hermitian: deviation {dev:.3e}", dev)
    herm = [(e + e.conj().T) / 2 for e in mats]
    worst_neg = 0.0
    for j, e in enumerate(herm):
        lo = float(np.linalg.eigvalsh(e)[0])
        worst_neg = min(worst_neg, lo)
    if worst_neg < -tol:
        raise NotPositiveError(
            f"most negative effect eigenvalue {worst_neg:.3e}", -worst_neg
        )
    total = sum(herm)
    dev = float(np.max(np.abs(total - np.eye(d))))
    if dev > tol:
        raise NotCompleteError(f"effects sum deviates from identity by {dev:.3e}", dev)
    return Povm(tuple(_freeze(e) for e in herm))


def povm_violations(raw: Sequence[np.ndarray]) -> dict[str, float]:
    """Worst hermiticity / positivity / completeness violations, without raising."""
    mats = [linalg.asoperator(e) for e in raw]
    d = mats[0].shape[0]
    herm_dev = max(float(np.max(np.abs(e - e.conj().T))) for e in mats)
    sym = [(e + e.conj().T) / 2 for e in mats]
    min_eig = min(float(np.linalg.eigvalsh(e)[0]) for e in sym)
    comp_dev = float(np.max(np.abs(sum(sym) - np.eye(d))))
    return {
        "hermiticity": herm_dev,
        "min_eigenvalue": min_eig,
        "completeness": comp_dev,
    }


def apply(m: Povm, rho: np.ndarray) -> np.ndarray:
    """Outcome distribution p_j = tr(M_j rho) of measuring the state rho."""
    rho = linalg.require_density(rho)
    if rho.shape[0] != m.dim:
        raise ValueError(f"state dim {rho.shape[0]} != measurement dim {m.dim}")
    p = np.array([float(np.trace(e @ rho).real) for e in m.effects])
    if np.any(p < -1e-12):
        raise ValueError(f"negative outcome probability {p.min():.3e}")
    p = np.clip(p, 0.0, None)
    if abs(p.sum() - 1.0) > 1e-10:
        raise ValueError(f"outcome probabilities sum to {p.sum():.12g}")
    return p


@dataclass(frozen=True, eq=False)
class ChoiOperator:
    """Block-diagonal Choi form sum_j |j><j| (x) M_j^T of a measurement.

    Transposes are taken in the computational product basis; the generating
    vector is the unnormalized maximally entangled sum_k |k>(x)|k>.
    """

    n: int
    d: int
    matrix: np.ndarray


def choi(m: Povm) -> ChoiOperator:
    n, d = m.n_outcomes, m.dim
    out = np.zeros((n * d, n * d), dtype=complex)
    for j, e in enumerate(m.effects):
        out[j * d : (j + 1) * d, j * d : (j + 1) * d] = e.T
    return ChoiOperator(n, d, _freeze(out))


def effects_from_choi(c: ChoiOperator) -> Povm:
    """Invert :func:`choi` by transposing the diagonal blocks back."""
    blocks = [
        c.matrix[j * c.d : (j + 1) * c.d, j * c.d : (j + 1) * c.d].T
        for j in range(c.n)
    ]
    return validate_povm(blocks)


def universal_not(x: np.ndarray) -> np.ndarray:
    """Qubit universal NOT map X -> tr(X) I - X (an involution, trace preserving)."""
    x = linalg.asoperator(x)
    if x.shape != (2, 2):
        raise ValueError("universal NOT is defined on qubit operators only")
    return np.trace(x) * np.eye(2) - x


def make_projective_qubit(phi: np.ndarray) -> Povm:
    """Projective qubit measurement {|phi><phi|, |phi_perp><phi_perp|}."""
    phi = linalg.require_state_vector(phi)
    if phi.size != 2:
        raise ValueError("expected a qubit state vector")
    perp = qubit_perp(phi)
    return validate_povm([linalg.proj(phi), linalg.proj(perp)])


def qubit_perp(phi: np.ndarray) -> np.ndarray:
    """The state orthogonal to a qubit vector, (-conj(b), conj(a)) for (a, b)."""
    phi = np.asarray(phi, dtype=complex).ravel()
    return np.array([-np.conj(phi[1]), np.conj(phi[0])])


def make_noisy_qubit(phi: np.ndarray, visibility: float) -> Povm:
    """Projective qubit measurement mixed with the uniform coin.

    M_1 = mu |phi><phi| + (1 - mu) I/2 and M_2 = universal_not(M_1); both
    effects have unit trace.
    """
    if not (0.0 <= visibility <= 1.0):
        raise ValueError("visibility must lie in [0, 1]")
    phi = linalg.require_state_vector(phi)
    m1 = visibility * linalg.proj(phi) + (1 - visibility) * np.eye(2) / 2
    return validate_povm([m1, universal_not(m1)])


TRINE_VECTORS = (
    np.array([1.0, 0.0], dtype=complex),
    np.array([0.5, np.sqrt(3) / 2], dtype=complex),
    np.array([0.5, -np.sqrt(3) / 2], dtype=complex),
)


def make_trine(theta: float = 0.0, rotated: bool = False) -> Povm:
    """Symmetric three-outcome qubit measurement with effects (2/3) |v_j><v_j|.

    With ``rotated`` the effects are conjugated by diag(1, e^{i theta}), the
    rotation by ``theta`` about the z axis.
    """
    effects = [2.0 / 3.0 * linalg.proj(v) for v in TRINE_VECTORS]
    if rotated:
        r = np.diag([1.0, np.exp(1j * theta)])
        effects = [r @ e @ r.conj().T for e in effects]
    return validate_povm(effects)


def make_perfect_family(
    m: int,
    n: int,
    phi: np.ndarray,
    weights: np.ndarray | None = None,
) -> list[Povm]:
    """m measurements with n >= m outcomes, all perfectly identified by probing |phi>.

    Device l fires outcome l with certainty on |phi>; its other effects are
    x_{lj} (I - |phi><phi|) with positive off-diagonal weights summing to one
    per row (uniform by default).
    """
    if m > n:
        raise ValueError(f"need at least as many outcomes as devices: m={m} > n={n}")
    if m < 1:
        raise ValueError("need at least one device")
    phi = linalg.require_state_vector(phi)
    d = phi.size
    if d < 2:
        raise ValueError("dimension must be at least 2")
    if weights is None:
        weights = np.full((m, n), 1.0 / (n - 1)) if n > 1 else np.zeros((m, 1))
        for l in range(m):
            weights[l, l] = 0.0
    x = np.asarray(weights, dtype=float)
    if x.shape != (m, n):
        raise ValueError(f"weights must have shape ({m}, {n})")
    comp = np.eye(d) - linalg.proj(phi)
    out = []
    for l in range(m):
        row = x[l]
        off = np.delete(row, l)
        if np.any(off <= 0):
            raise ValueError(f"off-diagonal weights of device {l} must be positive")
        if abs(off.sum() - 1.0) > 1e-12:
            raise ValueError(f"off-diagonal weights of device {l} sum to {off.sum():.12g}")
        effects = [
            linalg.proj(phi) if j == l else row[j] * comp for j in range(n)
        ]
        out.append(validate_povm(effects))
    return out


# -- JSON encoding -----------------------------------------------------------
#
# Measurement file schema:
#   {"dim": d, "outcomes": n, "effects": [effect, ...]}
# where each effect is a d x d row-major array of [re, im] pairs.


def encode_complex_matrix(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in a]


def decode_complex_matrix(rows: list) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)


def povm_to_json_dict(m: Povm) -> dict:
    return {
        "dim": m.dim,
        "outcomes": m.n_outcomes,
        "effects": [encode_complex_matrix(e) for e in m.effects],
    }


def povm_from_json_dict(obj: dict, tol: float = POVM_TOL) -> Povm:
    effects = [decode_complex_matrix(e) for e in obj["effects"]]
    m = validate_povm(effects, tol=tol)
    if "dim" in obj and int(obj["dim"]) != m.dim:
        raise ValueError(f"declared dim {obj['dim']} != effect dim {m.dim}")
    if "outcomes" in obj and int(obj["outcomes"]) != m.n_outcomes:
        raise ValueError(f"declared outcomes {obj['outcomes']} != {m.n_outcomes}")
    return m


def save_povm(m: Povm, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(povm_to_json_dict(m), fh, indent=2)


def load_povm(path: str, tol: float = POVM_TOL) -> Povm:
    with open(path, encoding="utf-8") as fh:
        return povm_from_json_dict(json.load(fh), tol=tol)
