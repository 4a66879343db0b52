"""Process POVMs (testers): the data model of a single-shot discrimination test.

A tester for devices with n outcomes on dimension d consists of PSD blocks
H_j^(c), one per (device outcome j, conclusion c), obeying
sum_c H_j^(c) = rho for every j, where rho is a density operator. The
conditional probability of concluding c on device M is
p(c|M) = sum_j tr(H_j^(c) M_j).

Conclusions are opaque strings; ``FAIL`` is the reserved inconclusive label.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import linalg
from .measurements import (
    Povm,
    encode_complex_matrix,
)

FAIL = "fail"
TESTER_TOL = 1e-9


def _freeze(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Tester:
    """A discrimination test: conclusions, per-outcome blocks and normalization."""

    conclusions: tuple[str, ...]
    blocks: dict[str, tuple[np.ndarray, ...]]  # conclusion -> (H_1, ..., H_n)
    rho: np.ndarray

    @property
    def n_outcomes(self) -> int:
        return len(next(iter(self.blocks.values())))

    @property
    def dim(self) -> int:
        return self.rho.shape[0]


def make_tester(
    blocks: Mapping[str, Sequence[np.ndarray]],
    rho: np.ndarray | None = None,
    tol: float = TESTER_TOL,
) -> Tester:
    """Validate blocks H_j^(c) and assemble a :class:`Tester`.

    Checks PSD-ness of every block and that sum_c H_j^(c) is the same unit
    trace density operator for every outcome j (taken as ``rho`` when given).
    """
    if not blocks:
        raise ValueError("a tester needs at least one conclusion")
    conclusions = tuple(blocks.keys())
    per_c = {c: [linalg.asoperator(h) for h in hs] for c, hs in blocks.items()}
    n = len(per_c[conclusions[0]])
    d = per_c[conclusions[0]][0].shape[0]
    for c, hs in per_c.items():
        if len(hs) != n:
            raise ValueError(f"conclusion {c!r} has {len(hs)} blocks, expected {n}")
        for j, h in enumerate(hs):
            if h.shape != (d, d):
                raise ValueError(f"block ({j}, {c!r}) has shape {h.shape}")
            hh = linalg.require_hermitian(h, tol)
            lo = float(np.linalg.eigvalsh(hh)[0])
            if lo < -tol:
                raise ValueError(f"block ({j}, {c!r}) not PSD: eigenvalue {lo:.3e}")
    sums = [sum(per_c[c][j] for c in conclusions) for j in range(n)]
    norm = linalg.asoperator(rho) if rho is not None else sums[0]
    for j, s in enumerate(sums):
        dev = float(np.max(np.abs(s - norm)))
        if dev > tol:
            raise ValueError(
                f"outcome {j}: sum of blocks deviates from the normalization by {dev:.3e}"
            )
    tr = float(np.trace(norm).real)
    if abs(tr - 1.0) > tol:
        raise ValueError(f"tester normalization has trace {tr:.12g} != 1")
    frozen = {c: tuple(_freeze(h) for h in per_c[c]) for c in conclusions}
    return Tester(conclusions, frozen, _freeze((norm + norm.conj().T) / 2))


def conditional_prob(t: Tester, m: Povm, c: str) -> float:
    """p(c | device m) = sum_j tr(H_j^(c) M_j)."""
    if c not in t.blocks:
        raise ValueError(f"unknown conclusion {c!r}; tester has {t.conclusions}")
    if m.n_outcomes != t.n_outcomes or m.dim != t.dim:
        raise ValueError(
            f"device shape ({m.n_outcomes}, {m.dim}) does not match tester "
            f"({t.n_outcomes}, {t.dim})"
        )
    val = sum(float(np.trace(h @ e).real) for h, e in zip(t.blocks[c], m.effects))
    return min(max(val, 0.0), 1.0) if -1e-12 <= val <= 1 + 1e-12 else val


def all_conditional_probs(t: Tester, m: Povm) -> dict[str, float]:
    probs = {c: conditional_prob(t, m, c) for c in t.conclusions}
    total = sum(probs.values())
    if abs(total - 1.0) > 1e-10:
        raise ValueError(f"conditional probabilities sum to {total:.12g}")
    return probs


@dataclass(frozen=True)
class DiscriminationReport:
    """(p_s, p_e, p_f) and the per-device conditional probability table."""

    p_s: float
    p_e: float
    p_f: float
    table: dict[str, dict[str, float]]


def performance(
    t: Tester,
    hypotheses: Sequence[tuple[str, Povm]],
    priors: Sequence[float] | None = None,
) -> DiscriminationReport:
    """Evaluate a tester against labeled device hypotheses.

    ``hypotheses`` pairs each device with the conclusion label that counts as
    identifying it. Success mass is prior-weighted p(label_i | device_i), the
    failure mass comes from the reserved ``fail`` conclusion, and everything
    else is error.
    """
    labels = [lab for lab, _ in hypotheses]
    if priors is None:
        priors = [1.0 / len(hypotheses)] * len(hypotheses)
    priors = np.asarray(priors, dtype=float)
    if np.any(priors < 0) or abs(priors.sum() - 1.0) > 1e-10:
        raise ValueError("priors must be nonnegative and sum to 1")
    if len(priors) != len(hypotheses):
        raise ValueError("one prior per hypothesis required")
    table: dict[str, dict[str, float]] = {}
    p_s = p_f = 0.0
    for (label, dev), eta in zip(hypotheses, priors):
        probs = all_conditional_probs(t, dev)
        table[label] = probs
        p_s += eta * probs.get(label, 0.0)
        p_f += eta * probs.get(FAIL, 0.0)
    p_e = 1.0 - p_s - p_f
    clip = lambda x: min(max(x, 0.0), 1.0) if -1e-12 <= x <= 1 + 1e-12 else x
    return DiscriminationReport(clip(p_s), clip(p_e), clip(p_f), table)


def symmetrize(
    t_ops: Mapping[str, np.ndarray],
    n_outcomes: int,
    rho: np.ndarray | None = None,
    tol: float = TESTER_TOL,
) -> Tester:
    """Project Choi-form test operators onto their block-diagonal form.

    Input operators T_c act on the (n * d)-dimensional outcome (x) system
    space and must satisfy sum_c T_c = I_n (x) rho. Pinching with the
    projectors |j><j| (x) I changes no conditional probability because the
    device Choi operators are block diagonal, so only the diagonal blocks
    H_j^(c) = <j| T_c |j> survive.
    """
    mats = {c: linalg.asoperator(tc) for c, tc in t_ops.items()}
    side = next(iter(mats.values())).shape[0]
    if side % n_outcomes != 0:
        raise ValueError(f"operator side {side} not divisible by n_outcomes {n_outcomes}")
    d = side // n_outcomes
    total = sum(mats.values())
    inferred = linalg.partial_trace(total, (n_outcomes, d), keep=1) / n_outcomes
    norm = linalg.asoperator(rho) if rho is not None else inferred
    dev = float(np.max(np.abs(total - linalg.kron(np.eye(n_outcomes), norm))))
    if dev > tol:
        raise ValueError(f"sum of test operators deviates from I (x) rho by {dev:.3e}")
    blocks = {
        c: [tc[j * d : (j + 1) * d, j * d : (j + 1) * d] for j in range(n_outcomes)]
        for c, tc in mats.items()
    }
    return make_tester(blocks, rho=norm, tol=tol)


def tester_from_protocol(
    probe: np.ndarray,
    dims: tuple[int, int],
    conditional_povms: Sequence[Povm],
    conclusion_of: Sequence[Sequence[str]],
) -> Tester:
    """Tester realized by a bipartite probe plus outcome-conditioned ancilla POVMs.

    The unknown device measures the first factor (dimension d); on device
    outcome j the ancilla (dimension a) is measured with
    ``conditional_povms[j]`` and ancilla outcome k is mapped to the conclusion
    ``conclusion_of[j][k]``. The blocks are
    H_j^(c) = sum_{k -> c} tr_anc[(I (x) E_k^(j)) |probe><probe|] and the
    normalization is the reduced probe state on the system side.
    """
    d, a = dims
    probe = linalg.require_state_vector(probe)
    if probe.size != d * a:
        raise ValueError(f"probe has size {probe.size}, expected {d * a}")
    n = len(conditional_povms)
    if len(conclusion_of) != n:
        raise ValueError("need one conclusion map per device outcome")
    r = probe.reshape(d, a)
    conclusions: list[str] = []
    for j, (povm_j, labels_j) in enumerate(zip(conditional_povms, conclusion_of)):
        if povm_j.dim != a:
            raise ValueError(f"conditional POVM {j} acts on dim {povm_j.dim}, expected {a}")
        if len(labels_j) != povm_j.n_outcomes:
            raise ValueError(f"conclusion map {j} length != POVM outcomes")
        for lab in labels_j:
            if lab not in conclusions:
                conclusions.append(lab)
    zero = np.zeros((d, d), dtype=complex)
    blocks = {c: [zero.copy() for _ in range(n)] for c in conclusions}
    for j, (povm_j, labels_j) in enumerate(zip(conditional_povms, conclusion_of)):
        for e, lab in zip(povm_j.effects, labels_j):
            blocks[lab][j] = blocks[lab][j] + r @ e.T @ r.conj().T
    rho = r @ r.conj().T
    return make_tester(blocks, rho=rho)


def simple_tester(
    probe: np.ndarray,
    assignment: Sequence[str | Mapping[str, float]],
) -> Tester:
    """Ancilla-free tester: prepare ``probe``, measure, post-process the outcome.

    ``assignment[j]`` is either a conclusion label (deterministic) or a
    distribution over conclusions q(c|j). Blocks are H_j^(c) = q(c|j) rho.
    """
    probe = np.asarray(probe, dtype=complex)
    rho = linalg.proj(probe) if probe.ndim == 1 else linalg.require_density(probe)
    dists: list[dict[str, float]] = []
    for j, entry in enumerate(assignment):
        q = {entry: 1.0} if isinstance(entry, str) else dict(entry)
        total = sum(q.values())
        if any(v < 0 for v in q.values()) or abs(total - 1.0) > 1e-12:
            raise ValueError(f"assignment for outcome {j} is not a distribution")
        dists.append(q)
    conclusions: list[str] = []
    for q in dists:
        for c in q:
            if c not in conclusions:
                conclusions.append(c)
    blocks = {
        c: [q.get(c, 0.0) * rho for q in dists] for c in conclusions
    }
    return make_tester(blocks, rho=rho)


def mix_testers(t1: Tester, t2: Tester, weight: float) -> Tester:
    """Convex combination weight * t1 + (1 - weight) * t2 (same conclusion sets)."""
    if not 0.0 <= weight <= 1.0:
        raise ValueError("weight must lie in [0, 1]")
    if set(t1.conclusions) != set(t2.conclusions):
        raise ValueError("testers must share their conclusion set")
    blocks = {
        c: [
            weight * h1 + (1 - weight) * h2
            for h1, h2 in zip(t1.blocks[c], t2.blocks[c])
        ]
        for c in t1.conclusions
    }
    return make_tester(blocks, rho=weight * t1.rho + (1 - weight) * t2.rho)


def choi_form(t: Tester) -> dict[str, np.ndarray]:
    """Block-diagonal Choi-form operators T_c = sum_j |j><j| (x) H_j^(c)."""
    n, d = t.n_outcomes, t.dim
    out = {}
    for c in t.conclusions:
        tc = np.zeros((n * d, n * d), dtype=complex)
        for j, h in enumerate(t.blocks[c]):
            tc[j * d : (j + 1) * d, j * d : (j + 1) * d] = h
        out[c] = tc
    return out


def tester_to_json_dict(t: Tester) -> dict:
    return {
        "n_outcomes": t.n_outcomes,
        "dim": t.dim,
        "conclusions": list(t.conclusions),
        "normalization": encode_complex_matrix(t.rho),
        "blocks": {
            c: [encode_complex_matrix(h) for h in t.blocks[c]] for c in t.conclusions
        },
    }


def save_tester(t: Tester, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tester_to_json_dict(t), fh, indent=2)
