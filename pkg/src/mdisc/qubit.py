"""Discrimination of projective and noisy qubit measurements via pure-state solvers.

The reflection symmetry X -> tr(X) I - X of a projective qubit pair pins the
tester normalization to I/2 and collapses each tester to a single qubit POVM
{E_c}. Discriminating the measurements is then exactly the problem of
discriminating the states |phi>, |psi> that define them, and any optimal
state POVM lifts back to an optimal tester through a maximally entangled
probe. This module implements the state solvers (minimum error, unambiguous,
fixed failure rate), the lifting protocol, and the multi-device and
simple-scheme variants.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .linalg import canonical_phase, proj, require_state_vector
from .measurements import (
    Povm,
    make_projective_qubit,
    make_noisy_qubit,
    qubit_perp,
    universal_not,
    validate_povm,
)
from .testers import (
    FAIL,
    DiscriminationReport,
    Tester,
    make_tester,
    performance,
    simple_tester,
    tester_from_protocol,
)


class InfeasibleError(Exception):
    """The requested discrimination mode cannot be realized for these devices."""


@dataclass(frozen=True)
class PureStateHypotheses:
    """Two pure qubit hypotheses |phi> (prior eta) and |psi> (prior 1 - eta)."""

    phi: np.ndarray
    psi: np.ndarray
    eta: float

    def __post_init__(self):
        phi = canonical_phase(require_state_vector(self.phi))
        psi = canonical_phase(require_state_vector(self.psi))
        if phi.size != 2 or psi.size != 2:
            raise ValueError("hypotheses must be qubit state vectors")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("prior must lie in [0, 1]")
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "psi", psi)

    @property
    def overlap(self) -> float:
        """F = |<psi|phi>|."""
        return float(min(abs(np.vdot(self.psi, self.phi)), 1.0))


def hypotheses_with_overlap(overlap: float, eta: float = 0.5) -> PureStateHypotheses:
    """Canonical real hypotheses |0> and F|0> + sqrt(1-F^2)|1> with the given overlap."""
    if not 0.0 <= overlap <= 1.0:
        raise ValueError("overlap must lie in [0, 1]")
    phi = np.array([1.0, 0.0])
    psi = np.array([overlap, np.sqrt(max(0.0, 1.0 - overlap**2))])
    return PureStateHypotheses(phi, psi, eta)


@dataclass(frozen=True, eq=False)
class StateDiscriminationPovm:
    """A state-discrimination POVM: one conclusive effect per label plus a fail effect."""

    labels: tuple[str, ...]
    effects: tuple[np.ndarray, ...]
    fail: np.ndarray

    def effect_map(self) -> dict[str, np.ndarray]:
        out = dict(zip(self.labels, self.effects))
        out[FAIL] = self.fail
        return out

    def as_povm(self) -> Povm:
        return validate_povm(list(self.effects) + [self.fail])

    @property
    def dim(self) -> int:
        return self.fail.shape[0]


def make_state_povm(
    labels: Sequence[str],
    effects: Sequence[np.ndarray],
    fail: np.ndarray | None = None,
    tol: float = 1e-9,
) -> StateDiscriminationPovm:
    d = np.asarray(effects[0]).shape[0]
    if fail is None:
        fail = np.eye(d, dtype=complex) - sum(np.asarray(e, dtype=complex) for e in effects)
    validate_povm(list(effects) + [fail], tol=tol)
    return StateDiscriminationPovm(
        tuple(labels),
        tuple(np.asarray(e, dtype=complex) for e in effects),
        np.asarray(fail, dtype=complex),
    )


def _positive_part_projector(h: np.ndarray, side: int, tol: float = 1e-12) -> np.ndarray:
    """Projector onto the strictly positive (side=+1) or negative (side=-1) eigenspace."""
    w, v = np.linalg.eigh(h)
    scale = max(1.0, float(np.max(np.abs(w))))
    sel = w > tol * scale if side > 0 else w < -tol * scale
    if not np.any(sel):
        return np.zeros_like(h)
    vs = v[:, sel]
    return vs @ vs.conj().T


def helstrom_pure(h: PureStateHypotheses) -> tuple[float, StateDiscriminationPovm]:
    """Minimum-error discrimination of two pure qubit states.

    p_e = (1 - sqrt(1 - 4 eta (1 - eta) F^2)) / 2, achieved by projecting onto
    the eigenspaces of Delta = (1 - eta)|psi><psi| - eta|phi><phi|: the
    negative eigenspace identifies |phi>, the rest identifies |psi>.
    """
    eta, F = h.eta, h.overlap
    p_e = 0.5 * (1.0 - np.sqrt(max(0.0, 1.0 - 4 * eta * (1 - eta) * F**2)))
    delta = (1 - eta) * proj(h.psi) - eta * proj(h.phi)
    e_m = _positive_part_projector(delta, side=-1)
    e_n = np.eye(2) - e_m
    povm = make_state_povm(("M", "N"), (e_m, e_n), fail=np.zeros((2, 2), dtype=complex))
    return float(p_e), povm


def unambiguous_pure(h: PureStateHypotheses) -> tuple[float, StateDiscriminationPovm]:
    """Unambiguous discrimination of two pure qubit states (p_e = 0, minimal p_f).

    Three regimes in x = (1 + F^2) eta:
        x <= F^2 : p_f = eta + (1 - eta) F^2, |phi> is never detected;
        middle   : p_f = 2 sqrt(eta (1 - eta)) F, all three outcomes live;
        x >= 1   : p_f = 1 - eta + eta F^2, |psi> is never detected.
    """
    eta, F = h.eta, h.overlap
    phi, psi = h.phi, h.psi
    phi_perp, psi_perp = qubit_perp(phi), qubit_perp(psi)
    x = (1 + F**2) * eta
    if x <= F**2:
        p_f = eta + (1 - eta) * F**2
        e_m = np.zeros((2, 2), dtype=complex)
        e_n = proj(phi_perp)
    elif x >= 1.0:
        p_f = 1 - eta + eta * F**2
        e_m = proj(psi_perp)
        e_n = np.zeros((2, 2), dtype=complex)
    else:
        p_f = 2 * np.sqrt(eta * (1 - eta)) * F
        if 1 - F**2 < 1e-14:
            # the middle regime touches F = 1 only at eta = 1/2, where both
            # coefficients reduce to 1 / (1 + F)
            c_m = c_n = 1.0 / (1.0 + F)
        else:
            c_m = (1 - np.sqrt((1 - eta) / eta) * F) / (1 - F**2)
            c_n = (1 - np.sqrt(eta / (1 - eta)) * F) / (1 - F**2)
        e_m = c_m * proj(psi_perp)
        e_n = c_n * proj(phi_perp)
    povm = make_state_povm(("M", "N"), (e_m, e_n))
    return float(p_f), povm


@dataclass(frozen=True)
class FixedFailureResult:
    p_s: float
    p_e: float
    p_f: float
    povm: StateDiscriminationPovm
    clamped: bool  # True when the requested failure rate exceeded the unambiguous one


def fixed_failure_pure(
    h: PureStateHypotheses,
    p_f: float,
    grid_points: int = 721,
    refine_tol: float = 1e-8,
) -> FixedFailureResult:
    """Maximize p_s over three-outcome qubit POVMs at exactly the given failure rate.

    The inconclusive effect is searched as a |chi><chi| over real directions
    chi in the frame where both hypotheses are real (a conjugation symmetry of
    the problem), with the weight a pinned by the failure constraint. The
    conclusive remainder S = I - a|chi><chi| is split optimally by taking the
    positive part of sqrt(S) (eta |phi><phi| - (1-eta)|psi><psi|) sqrt(S).
    Endpoints reproduce the minimum-error and unambiguous solutions.
    """
    if not 0.0 <= p_f <= 1.0:
        raise ValueError("target failure rate must lie in [0, 1]")
    pf_max, _ = unambiguous_pure(h)
    clamped = p_f > pf_max + 1e-12
    target = min(p_f, pf_max)

    eta, F = h.eta, h.overlap
    # frame where phi = (1, 0) and psi = (F, s), both real
    phi = h.phi
    overlap_c = np.vdot(phi, h.psi)
    psi_aligned = h.psi * (np.exp(-1j * np.angle(overlap_c)) if abs(overlap_c) > 1e-14 else 1.0)
    w = psi_aligned - F * phi
    b2 = w / np.linalg.norm(w) if np.linalg.norm(w) > 1e-9 else qubit_perp(phi)
    basis = np.column_stack([phi, b2])
    s = float(np.sqrt(max(0.0, 1.0 - F**2)))
    phi_c = np.array([1.0, 0.0])
    psi_c = np.array([F, s])
    weight = eta * np.outer(phi_c, phi_c) + (1 - eta) * np.outer(psi_c, psi_c)
    lam = eta * np.outer(phi_c, phi_c) - (1 - eta) * np.outer(psi_c, psi_c)

    def evaluate(t: float) -> tuple[float, float] | None:
        chi = np.array([np.cos(t), np.sin(t)])
        den = float(chi @ weight @ chi)
        if den < target - 1e-12:
            return None
        a = min(target / den, 1.0) if den > 0 else 0.0
        p_proj = np.outer(chi, chi)
        root_s = np.eye(2) - (1.0 - np.sqrt(max(0.0, 1.0 - a))) * p_proj
        g = root_s @ lam @ root_s
        eig = np.linalg.eigvalsh(g)
        p_s = (1 - eta) * float(psi_c @ (np.eye(2) - a * p_proj) @ psi_c) + float(
            eig[eig > 0].sum()
        )
        return p_s, a

    ts = np.linspace(0.0, np.pi, grid_points, endpoint=False)
    best_t, best = None, -1.0
    for t in ts:
        r = evaluate(t)
        if r is not None and r[0] > best:
            best, best_t = r[0], t
    if best_t is None:
        raise InfeasibleError(f"no rank-one inconclusive effect reaches p_f = {target:g}")
    step = float(ts[1] - ts[0])
    t0 = best_t
    while step > refine_tol:
        for cand in (t0 - step, t0 + step):
            r = evaluate(cand)
            if r is not None and r[0] > best:
                best, t0 = r[0], cand
        step *= 0.5

    p_s, a = evaluate(t0)
    chi = np.array([np.cos(t0), np.sin(t0)])
    p_proj = np.outer(chi, chi)
    root_s = np.eye(2) - (1.0 - np.sqrt(max(0.0, 1.0 - a))) * p_proj
    g = root_s @ lam @ root_s
    e_m_c = root_s @ _positive_part_projector(g, side=+1) @ root_s
    e_f_c = a * p_proj
    e_n_c = np.eye(2) - e_m_c - e_f_c
    rot = lambda e: basis @ e.astype(complex) @ basis.conj().T
    povm = make_state_povm(("M", "N"), (rot(e_m_c), rot(e_n_c)), fail=rot(e_f_c))
    p_e = 1.0 - p_s - target
    return FixedFailureResult(float(p_s), float(max(p_e, 0.0)), float(target), povm, clamped)


def helstrom_mixed(rho0: np.ndarray, rho1: np.ndarray, eta: float) -> tuple[float, Povm]:
    """Minimum-error discrimination of two density operators with priors (eta, 1 - eta).

    p_e = (1 - ||eta rho0 - (1 - eta) rho1||_1) / 2; the first effect projects
    onto the strictly positive eigenspace of the weighted difference.
    """
    rho0 = linalg.require_density(rho0)
    rho1 = linalg.require_density(rho1)
    if rho0.shape != rho1.shape:
        raise ValueError("hypotheses must share their dimension")
    diff = eta * rho0 - (1 - eta) * rho1
    p_e = 0.5 * (1.0 - linalg.trace_norm(diff))
    e0 = _positive_part_projector(diff, side=+1)
    povm = validate_povm([e0, np.eye(rho0.shape[0]) - e0])
    return float(max(p_e, 0.0)), povm


MAX_ENTANGLED = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2)
SINGLET = np.array([0.0, 1.0, -1.0, 0.0], dtype=complex) / np.sqrt(2)


def measurement_protocol(e: StateDiscriminationPovm, probe: str = "max-entangled") -> Tester:
    """Lift a qubit state-discrimination POVM to a tester for binary qubit devices.

    With the maximally entangled probe (|00> + |11>)/sqrt(2): on device
    outcome 1 the ancilla is measured with {E_c^T}, on outcome 2 with
    {universal_not(E_c)^T}. The blocks come out as H_1^(c) = E_c / 2 and
    H_2^(c) = universal_not(E_c) / 2, so every conditional probability equals
    the state-discrimination one, tr(E_c |phi><phi|).

    The singlet probe (|01> - |10>)/sqrt(2) realizes the same tester with the
    outcome-1 ancilla states flipped to the orthogonal complements.
    """
    if e.dim != 2:
        raise ValueError("protocol is defined for qubit state POVMs")
    labels = list(e.labels) + [FAIL]
    effects = list(e.effects) + [e.fail]
    if probe == "max-entangled":
        probe_vec = MAX_ENTANGLED
        povm1 = validate_povm([x.T for x in effects])
        povm2 = validate_povm([universal_not(x).T for x in effects])
    elif probe == "singlet":
        probe_vec = SINGLET
        u = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)  # i sigma_y
        povm1 = validate_povm([(u @ x @ u.conj().T).T for x in effects])
        povm2 = validate_povm([np.asarray(x, dtype=complex) for x in effects])
    else:
        raise ValueError("probe must be 'max-entangled' or 'singlet'")
    return tester_from_protocol(
        probe_vec, (2, 2), [povm1, povm2], [labels, labels]
    )


def gamma_symmetrize_tester(t: Tester) -> Tester:
    """Average a binary-qubit tester with its universal-NOT reflection.

    The reflected blocks H'_1 = not(H_2), H'_2 = not(H_1) give the same
    conditional probabilities on any devices satisfying M_2 = not(M_1); the
    average has normalization I/2 and not(H_1^(c)) = H_2^(c).
    """
    if t.dim != 2 or t.n_outcomes != 2:
        raise ValueError("symmetrization applies to binary qubit testers")
    blocks = {
        c: [
            (t.blocks[c][0] + universal_not(t.blocks[c][1])) / 2,
            (t.blocks[c][1] + universal_not(t.blocks[c][0])) / 2,
        ]
        for c in t.conclusions
    }
    return make_tester(blocks)


@dataclass(frozen=True)
class PairDiscrimination:
    report: DiscriminationReport
    tester: Tester
    state_povm: StateDiscriminationPovm
    simple_probe: np.ndarray | None = None
    simple_tester: Tester | None = None
    simple_report: DiscriminationReport | None = None


def discriminate_projective_pair(
    phi: np.ndarray,
    psi: np.ndarray,
    eta: float = 0.5,
    mode: str = "min-error",
    p_f: float | None = None,
) -> PairDiscrimination:
    """Optimal discrimination of the projective qubit measurements built on phi, psi.

    Solves the equivalent pure-state problem, lifts the optimal POVM through
    the entangled protocol, and evaluates the resulting tester on the actual
    measurement pair. Minimum error additionally returns the ancilla-free
    realization probing the top eigenvector of
    (1 - eta)|psi><psi| - eta|phi><phi|, which achieves the same error rate.
    """
    h = PureStateHypotheses(phi, psi, eta)
    if mode == "min-error":
        _, povm = helstrom_pure(h)
    elif mode == "unambiguous":
        _, povm = unambiguous_pure(h)
    elif mode == "fixed-failure":
        if p_f is None:
            raise ValueError("fixed-failure mode needs the target failure rate")
        povm = fixed_failure_pure(h, p_f).povm
    else:
        raise ValueError(f"unknown mode {mode!r}")
    tester = measurement_protocol(povm)
    devices = [("M", make_projective_qubit(h.phi)), ("N", make_projective_qubit(h.psi))]
    report = performance(tester, devices, priors=[eta, 1 - eta])

    simple_probe = simple_t = simple_rep = None
    if mode == "min-error":
        delta = (1 - eta) * proj(h.psi) - eta * proj(h.phi)
        _, v = np.linalg.eigh(delta)
        simple_probe = canonical_phase(v[:, -1])
        simple_t = simple_tester(simple_probe, ["N", "M"])
        simple_rep = performance(simple_t, devices, priors=[eta, 1 - eta])
        if abs(simple_rep.p_e - report.p_e) > 1e-10:
            raise AssertionError(
                f"simple and entangled realizations disagree: "
                f"{simple_rep.p_e:.3e} vs {report.p_e:.3e}"
            )
    elif mode == "unambiguous":
        x = (1 + h.overlap**2) * eta
        if x >= 1.0:
            simple_probe = canonical_phase(qubit_perp(h.psi))
            simple_t = simple_tester(simple_probe, ["M", FAIL])
            simple_rep = performance(simple_t, devices, priors=[eta, 1 - eta])
        elif x <= h.overlap**2:
            simple_probe = canonical_phase(qubit_perp(h.phi))
            simple_t = simple_tester(simple_probe, ["N", FAIL])
            simple_rep = performance(simple_t, devices, priors=[eta, 1 - eta])
    return PairDiscrimination(report, tester, povm, simple_probe, simple_t, simple_rep)


@dataclass(frozen=True)
class NoisyPairDiscrimination:
    report: DiscriminationReport
    tester: Tester
    state_povm: StateDiscriminationPovm


def discriminate_noisy_pair(
    phi: np.ndarray,
    mu: float,
    psi: np.ndarray,
    nu: float,
    eta: float = 0.5,
    mode: str = "min-error",
    p_f: float | None = None,
) -> NoisyPairDiscrimination:
    """Discriminate noisy qubit measurements (projective mixed with the uniform coin).

    Both devices keep the reflection symmetry, so the problem reduces to
    discriminating the mixed states M_1 = mu|phi><phi| + (1-mu) I/2 and
    N_1 = nu|psi><psi| + (1-nu) I/2 with the same priors. Minimum error uses
    the weighted trace-norm formula; unambiguous conclusions exist only when
    one of the states is pure (otherwise the supports coincide and the mode
    is infeasible). Fixed failure rate is delegated to the brute-force
    searcher except in the noiseless limit.
    """
    phi = canonical_phase(require_state_vector(phi))
    psi = canonical_phase(require_state_vector(psi))
    m_dev = make_noisy_qubit(phi, mu)
    n_dev = make_noisy_qubit(psi, nu)
    devices = [("M", m_dev), ("N", n_dev)]
    priors = [eta, 1 - eta]
    s_m, s_n = m_dev.effects[0], n_dev.effects[0]

    if mode == "min-error":
        _, povm2 = helstrom_mixed(s_m, s_n, eta)
        povm = make_state_povm(("M", "N"), povm2.effects, fail=np.zeros((2, 2), complex))
    elif mode == "unambiguous":
        m_pure, n_pure = mu >= 1.0 - 1e-12, nu >= 1.0 - 1e-12
        if m_pure and n_pure:
            _, povm = unambiguous_pure(PureStateHypotheses(phi, psi, eta))
        elif m_pure:
            povm = make_state_povm(
                ("M", "N"), (np.zeros((2, 2), complex), proj(qubit_perp(phi)))
            )
        elif n_pure:
            povm = make_state_povm(
                ("M", "N"), (proj(qubit_perp(psi)), np.zeros((2, 2), complex))
            )
        else:
            raise InfeasibleError(
                "unambiguous discrimination is impossible: both noisy states are "
                "full rank, their supports coincide"
            )
    elif mode == "fixed-failure":
        if p_f is None:
            raise ValueError("fixed-failure mode needs the target failure rate")
        if mu >= 1.0 - 1e-12 and nu >= 1.0 - 1e-12:
            res = discriminate_projective_pair(phi, psi, eta, "fixed-failure", p_f)
            return NoisyPairDiscrimination(res.report, res.tester, res.state_povm)
        from .oracle import SearchConfig, oracle_state_povm

        result = oracle_state_povm(
            [s_m, s_n], priors, mode="fixed-failure", cfg=SearchConfig(), p_f=p_f
        )
        em, en, ef = result.povm.effects
        povm = make_state_povm(("M", "N"), (em, en), fail=ef)
    else:
        raise ValueError(f"unknown mode {mode!r}")

    tester = measurement_protocol(povm)
    report = performance(tester, devices, priors=priors)
    return NoisyPairDiscrimination(report, tester, povm)


@dataclass(frozen=True)
class MultiDiscrimination:
    report: DiscriminationReport
    tester: Tester
    state_povm: StateDiscriminationPovm
    p_s_states: float  # optimal success probability of the underlying state problem


def _gram_fidelities(phis: Sequence[np.ndarray]) -> np.ndarray:
    m = len(phis)
    g = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            g[i, j] = abs(np.vdot(phis[i], phis[j]))
    return g


def _is_circulant(g: np.ndarray, tol: float = 1e-9) -> bool:
    m = g.shape[0]
    return all(
        abs(g[i, j] - g[0, (j - i) % m]) <= tol for i in range(m) for j in range(m)
    )


def discriminate_multi_projective(
    phis: Sequence[np.ndarray],
    priors: Sequence[float] | None = None,
) -> MultiDiscrimination:
    """Minimum-error discrimination of m projective qubit measurements.

    The problem equals minimum-error discrimination of the defining pure
    states. Two devices go through the exact two-state formula; equiprobable
    symmetric families (circulant pairwise fidelities) use the square-root
    measurement, which is optimal there; anything else falls back to the
    brute-force searcher. The optimal state POVM is lifted through the
    entangled protocol, extended to m conclusions.
    """
    phis = [canonical_phase(require_state_vector(p)) for p in phis]
    m = len(phis)
    if m < 2:
        raise ValueError("need at least two devices")
    if any(p.size != 2 for p in phis):
        raise ValueError("devices must be qubit measurements")
    if priors is None:
        priors = [1.0 / m] * m
    priors = list(map(float, priors))
    labels = tuple(f"M{l + 1}" for l in range(m))
    fid = _gram_fidelities(phis)

    if m == 2:
        _, pair_povm = helstrom_pure(PureStateHypotheses(phis[0], phis[1], priors[0]))
        effects = pair_povm.effects
    elif np.all(fid > 1.0 - 1e-12):
        # all states identical: guess the likeliest device
        k = int(np.argmax(priors))
        effects = tuple(
            np.eye(2, dtype=complex) if l == k else np.zeros((2, 2), complex)
            for l in range(m)
        )
    elif max(abs(p - 1.0 / m) for p in priors) < 1e-12 and _is_circulant(fid):
        total = sum(proj(p) for p in phis)
        w, v = np.linalg.eigh(total)
        inv_sqrt = (v * (1.0 / np.sqrt(w))) @ v.conj().T
        effects = tuple(inv_sqrt @ proj(p) @ inv_sqrt for p in phis)
    else:
        from .oracle import SearchConfig, oracle_state_povm

        result = oracle_state_povm(
            [proj(p) for p in phis], priors, mode="min-error", cfg=SearchConfig()
        )
        effects = result.povm.effects
    povm = make_state_povm(labels, effects, fail=np.zeros((2, 2), complex))
    p_s_states = sum(
        eta * float(np.real(np.vdot(p, e @ p)))
        for eta, p, e in zip(priors, phis, effects)
    )
    tester = measurement_protocol(povm)
    devices = [(lab, make_projective_qubit(p)) for lab, p in zip(labels, phis)]
    report = performance(tester, devices, priors=priors)
    return MultiDiscrimination(report, tester, povm, float(p_s_states))


@dataclass(frozen=True)
class SimpleSchemeResult:
    p_s: float
    probe: np.ndarray
    assignment: tuple[str, ...]
    polar: float
    azimuth: float


def _bloch_affine_forms(measurements: Sequence[Povm]) -> tuple[np.ndarray, np.ndarray]:
    """Outcome probabilities as tr(M rho) = a + b . r over the Bloch vector r."""
    paulis = [
        np.array([[0, 1], [1, 0]], complex),
        np.array([[0, -1j], [1j, 0]], complex),
        np.array([[1, 0], [0, -1]], complex),
    ]
    m, n = len(measurements), measurements[0].n_outcomes
    a = np.zeros((m, n))
    b = np.zeros((m, n, 3))
    for l, dev in enumerate(measurements):
        for j, e in enumerate(dev.effects):
            a[l, j] = float(np.trace(e).real) / 2
            for k, s in enumerate(paulis):
                b[l, j, k] = float(np.trace(e @ s).real) / 2
    return a, b


def best_simple_scheme(
    measurements: Sequence[Povm],
    priors: Sequence[float] | None = None,
    grid_deg: float = 1.0,
) -> SimpleSchemeResult:
    """Best ancilla-free strategy: optimal pure probe plus deterministic post-processing.

    For a probe rho the optimal assignment sends outcome j to the device
    maximizing eta_l tr(M_lj rho), so p_s(rho) = sum_j max_l eta_l tr(M_lj rho)
    is maximized over the Bloch sphere by a grid with local refinement. Ties
    between equally good probes are broken toward the smallest polar angle
    (then azimuth) so results are reproducible.
    """
    m = len(measurements)
    if any(dev.dim != 2 for dev in measurements):
        raise ValueError("simple-scheme search covers qubit devices only")
    n = measurements[0].n_outcomes
    if any(dev.n_outcomes != n for dev in measurements):
        raise ValueError("devices must share their outcome count")
    if priors is None:
        priors = [1.0 / m] * m
    eta = np.asarray(priors, dtype=float)
    a, b = _bloch_affine_forms(measurements)
    wa = eta[:, None] * a  # (m, n)
    wb = eta[:, None, None] * b  # (m, n, 3)

    def p_s_of(points: np.ndarray) -> np.ndarray:
        vals = wa[None, :, :] + np.einsum("ljk,pk->plj", wb, points)
        return vals.max(axis=1).sum(axis=1)

    step = np.deg2rad(grid_deg)
    thetas = np.arange(0.0, np.pi + step / 2, step)
    azims = np.arange(0.0, 2 * np.pi, step)
    tt, pp = np.meshgrid(thetas, azims, indexing="ij")
    pts = np.stack(
        [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1
    ).reshape(-1, 3)
    vals = p_s_of(pts)
    order = np.argsort(vals)[::-1][:48]

    def refine(theta: float, az: float) -> tuple[float, float, float]:
        cur = float(p_s_of(_sph(theta, az))[0])
        h = step
        while h > 1e-9:
            moved = True
            while moved:
                moved = False
                for dt, dp in ((h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)):
                    cand = float(p_s_of(_sph(theta + dt, az + dp))[0])
                    if cand > cur + 1e-15:
                        cur, theta, az = cand, theta + dt, az + dp
                        moved = True
            h *= 0.5
        return cur, theta, az

    candidates = []
    seeds = {(round(float(tt.ravel()[i]), 6), round(float(pp.ravel()[i]), 6)) for i in order}
    for th0, ph0 in seeds:
        candidates.append(refine(th0, ph0))
    best_val = max(c[0] for c in candidates)
    tied = [c for c in candidates if c[0] >= best_val - 1e-9]
    tied = [(v,) + _canonical_angles(th, ph) for v, th, ph in tied]
    tied.sort(key=lambda c: (c[1], c[2]))
    _, theta, az = tied[0]
    best_val = float(p_s_of(_sph(theta, az))[0])
    probe = canonical_phase(
        np.array([np.cos(theta / 2), np.exp(1j * az) * np.sin(theta / 2)])
    )
    rvec = _sph(theta, az)[0]
    per_outcome = wa + np.einsum("ljk,k->lj", wb, rvec)
    assignment = tuple(f"M{int(l) + 1}" for l in per_outcome.argmax(axis=0))
    return SimpleSchemeResult(best_val, probe, assignment, float(theta), float(az))


def _sph(theta: float, az: float) -> np.ndarray:
    return np.array(
        [[np.sin(theta) * np.cos(az), np.sin(theta) * np.sin(az), np.cos(theta)]]
    )


def _canonical_angles(theta: float, az: float) -> tuple[float, float]:
    """Fold spherical angles into theta in [0, pi], azimuth in [0, 2 pi)."""
    theta = theta % (2 * np.pi)
    if theta > np.pi:
        theta = 2 * np.pi - theta
        az += np.pi
    az = az % (2 * np.pi)
    if theta < 1e-12 or np.pi - theta < 1e-12:
        az = 0.0
    return float(theta), float(az)
