"""Perfect distinguishability criteria and minimum-error distance for device pairs.

Binary pairs admit an exact criterion: they are perfectly distinguishable iff
some probe |psi> satisfies <psi|M_j|psi> = 1 and <psi|N_j|psi> = 0 for j = 1
or 2, so a simple (ancilla-free) scheme already suffices. For general pairs
the minimum error is governed by the completely bounded distance, evaluated
here for qubit devices by maximizing the stabilized trace-norm sum over the
Bloch ball; the ancilla-free analogue maximizes total variation over pure
probes and can be strictly smaller.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .measurements import Povm
from .testers import performance, simple_tester


@dataclass(frozen=True)
class PerfectWitness:
    """A probe and outcome labeling certifying perfect discrimination."""

    probe: np.ndarray
    certainty_outcome: int  # outcome that fires with certainty on the first device
    identified: tuple[str, ...]  # per-outcome device label ("M" or "N")


def binary_perfect_check(m: Povm, n: Povm) -> PerfectWitness | None:
    """Exact perfect-discrimination test for two binary measurements.

    For j in {1, 2}, intersect the eigenvalue-1 eigenspace of M_j with the
    kernel of N_j; any unit vector there is a probe on which outcome j is
    certain for M and impossible for N. The criterion is an iff, so a None
    result means no perfect discrimination exists at all.
    """
    if m.n_outcomes != 2 or n.n_outcomes != 2:
        raise ValueError("binary criterion requires two-outcome measurements")
    if m.dim != n.dim:
        raise ValueError("measurements must share their dimension")
    for j in range(2):
        ones = linalg.eigenspace_projector(m.effects[j], 1.0)
        kern = linalg.eigenspace_projector(n.effects[j], 0.0)
        inter = linalg.subspace_intersection(ones, kern)
        if float(np.trace(inter).real) > 0.5:
            w, v = np.linalg.eigh(inter)
            probe = linalg.canonical_phase(v[:, -1])
            identified = ("M", "N") if j == 0 else ("N", "M")
            return PerfectWitness(probe, j, identified)
    return None


def verify_witness(m: Povm, n: Povm, w: PerfectWitness, tol: float = 1e-9) -> bool:
    """Check that the witness probe really yields deterministic, disjoint outcomes."""
    rho = linalg.proj(w.probe)
    pm, pn = m.apply(rho), n.apply(rho)
    j = w.certainty_outcome
    other = 1 - j
    return (
        abs(pm[j] - 1.0) <= tol
        and pn[j] <= tol
        and abs(pn[other] - 1.0) <= tol
        and pm[other] <= tol
    )


@dataclass(frozen=True)
class SimpleSchemeCheck:
    probe: np.ndarray | None
    min_value: float
    exhaustive: bool


def _sphere_points(step_deg: float) -> np.ndarray:
    step = np.deg2rad(step_deg)
    thetas = np.arange(0.0, np.pi + step / 2, step)
    azims = np.arange(0.0, 2 * np.pi, step)
    tt, pp = np.meshgrid(thetas, azims, indexing="ij")
    return np.stack(
        [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1
    ).reshape(-1, 3)


def _qubit_affine(povm: Povm) -> tuple[np.ndarray, np.ndarray]:
    paulis = [
        np.array([[0, 1], [1, 0]], complex),
        np.array([[0, -1j], [1j, 0]], complex),
        np.array([[1, 0], [0, -1]], complex),
    ]
    a = np.array([float(np.trace(e).real) / 2 for e in povm.effects])
    b = np.array(
        [[float(np.trace(e @ s).real) / 2 for s in paulis] for e in povm.effects]
    )
    return a, b


def _refine_on_sphere(f, theta: float, az: float, step: float, min_step: float):
    cur = f(theta, az)
    while step > min_step:
        moved = True
        while moved:
            moved = False
            for dt, dp in ((step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)):
                cand = f(theta + dt, az + dp)
                if cand < cur - 1e-18:
                    cur, theta, az = cand, theta + dt, az + dp
                    moved = True
        step *= 0.5
    return cur, theta, az


def simple_scheme_perfect_check(
    m: Povm, n: Povm, grid_deg: float = 1.0
) -> SimpleSchemeCheck:
    """Search for an ancilla-free perfect-discrimination probe.

    Minimizes f(psi) = sum_j <psi|M_j|psi> <psi|N_j|psi> over pure probes; a
    vanishing minimum (<= 1e-9) is necessary and sufficient for a simple
    scheme to discriminate perfectly. Exhaustive (grid plus refinement down to
    1e-10 steps) for qubits; higher dimensions report the best found value
    from seeded random starts, flagged non-exhaustive.
    """
    if m.n_outcomes != n.n_outcomes or m.dim != n.dim:
        raise ValueError("measurements must share outcomes and dimension")
    if m.dim == 2:
        am, bm = _qubit_affine(m)
        an, bn = _qubit_affine(n)

        def f_points(points: np.ndarray) -> np.ndarray:
            mu = am[None, :] + points @ bm.T
            nu = an[None, :] + points @ bn.T
            return (mu * nu).sum(axis=1)

        def f_angles(theta: float, az: float) -> float:
            p = np.array(
                [[np.sin(theta) * np.cos(az), np.sin(theta) * np.sin(az), np.cos(theta)]]
            )
            return float(f_points(p)[0])

        pts = _sphere_points(grid_deg)
        vals = f_points(pts)
        i = int(vals.argmin())
        theta0 = float(np.arccos(np.clip(pts[i, 2], -1, 1)))
        az0 = float(np.arctan2(pts[i, 1], pts[i, 0]))
        best, theta, az = _refine_on_sphere(
            f_angles, theta0, az0, np.deg2rad(grid_deg), 1e-10
        )
        probe = linalg.canonical_phase(
            np.array([np.cos(theta / 2), np.exp(1j * az) * np.sin(theta / 2)])
        )
        found = best <= 1e-9
        return SimpleSchemeCheck(probe if found else None, float(max(best, 0.0)), True)

    # non-exhaustive path: seeded random pure probes with local refinement
    rng = np.random.default_rng(20250809)
    best, best_v = np.inf, None
    for _ in range(400):
        v = rng.normal(size=m.dim) + 1j * rng.normal(size=m.dim)
        v /= np.linalg.norm(v)
        rho = linalg.proj(v)
        val = float(
            sum(
                np.trace(e @ rho).real * np.trace(g @ rho).real
                for e, g in zip(m.effects, n.effects)
            )
        )
        if val < best:
            best, best_v = val, v
    found = best <= 1e-9
    return SimpleSchemeCheck(
        linalg.canonical_phase(best_v) if found else None, float(max(best, 0.0)), False
    )


@dataclass(frozen=True)
class FamilyVerification:
    certainty: tuple[float, ...]  # p(l | device l) per device
    all_pass: bool


def verify_perfect_family(
    measurements: list[Povm], probe: np.ndarray, tol: float = 1e-9
) -> FamilyVerification:
    """Verify that probing with ``probe`` identifies every device with certainty.

    Runs the ancilla-free tester that maps outcome j to conclusion j and
    checks p(l | device l) = 1 for each device. More devices than outcomes is
    rejected outright; perfect identification cannot exist there.
    """
    m = len(measurements)
    n = measurements[0].n_outcomes
    if m > n:
        raise ValueError(f"{m} devices cannot be perfectly told apart with {n} outcomes")
    labels = [f"M{l + 1}" for l in range(m)]
    assignment = [labels[j] if j < m else f"unused{j}" for j in range(n)]
    t = simple_tester(np.asarray(probe, dtype=complex), assignment)
    certainty = []
    for l, dev in enumerate(measurements):
        rep = performance(t, [(labels[l], dev)], priors=[1.0])
        certainty.append(rep.p_s)
    ok = all(abs(c - 1.0) <= tol for c in certainty)
    return FamilyVerification(tuple(certainty), ok)


# -- minimum-error distance over probes --------------------------------------


@dataclass(frozen=True)
class MinErrorPairResult:
    p_e: float
    optimal_state: np.ndarray  # reduced probe state achieving the maximum found
    cb_value: float  # max_sigma sum_j || sqrt(sigma) (M_j - N_j)^T sqrt(sigma) ||_1
    exhaustive: bool


def _sqrt_2x2_psd_batch(sig: np.ndarray) -> np.ndarray:
    """Principal square roots of a batch of 2x2 PSD matrices, closed form."""
    tr = np.einsum("...ii->...", sig).real
    det = (sig[..., 0, 0] * sig[..., 1, 1] - sig[..., 0, 1] * sig[..., 1, 0]).real
    s = np.sqrt(np.clip(det, 0.0, None))
    t = np.sqrt(np.clip(tr + 2 * s, 1e-300, None))
    out = sig.copy()
    out[..., 0, 0] += s
    out[..., 1, 1] += s
    return out / t[..., None, None]


def _trace_norm_2x2_batch(x: np.ndarray) -> np.ndarray:
    """||X||_1 for a batch of 2x2 matrices: sqrt(tr X^dag X + 2 |det X|)."""
    frob2 = (np.abs(x) ** 2).sum(axis=(-2, -1))
    det = x[..., 0, 0] * x[..., 1, 1] - x[..., 0, 1] * x[..., 1, 0]
    return np.sqrt(np.clip(frob2 + 2 * np.abs(det), 0.0, None))


def _ball_points(step: float) -> np.ndarray:
    axis = np.arange(-1.0, 1.0 + step / 2, step)
    xx, yy, zz = np.meshgrid(axis, axis, axis, indexing="ij")
    pts = np.stack([xx, yy, zz], axis=-1).reshape(-1, 3)
    return pts[(pts**2).sum(axis=1) <= 1.0 + 1e-12]


def _cb_sum_at(points: np.ndarray, deltas_t: np.ndarray) -> np.ndarray:
    """sum_j || sqrt(sigma) Delta_j^T sqrt(sigma) ||_1 at Bloch-ball points."""
    paulis = np.array(
        [
            [[0, 1], [1, 0]],
            [[0, -1j], [1j, 0]],
            [[1, 0], [0, -1]],
        ],
        dtype=complex,
    )
    sig = 0.5 * (np.eye(2)[None, :, :] + np.einsum("pk,kab->pab", points, paulis))
    roots = _sqrt_2x2_psd_batch(sig)
    total = np.zeros(points.shape[0])
    for dt in deltas_t:
        x = roots @ dt[None, :, :] @ roots
        total += _trace_norm_2x2_batch(x)
    return total


def minerror_pair(
    m: Povm, n: Povm, grid_step: float = 0.02
) -> MinErrorPairResult:
    """Minimum-error probability for equiprobable devices via the stabilized distance.

    p_e = (1 - D/2) / 2 with D = max over states sigma of
    sum_j || sqrt(sigma) (M_j - N_j)^T sqrt(sigma) ||_1; a purification of the
    maximizing sigma is the optimal entangled probe. Exhaustive (Bloch-ball
    grid plus coordinate refinement to 1e-8) for qubits; larger dimensions
    sample seeded random states and flag the result non-exhaustive.
    """
    if m.n_outcomes != n.n_outcomes or m.dim != n.dim:
        raise ValueError("measurements must share outcomes and dimension")
    deltas_t = np.array([ (e - g).T for e, g in zip(m.effects, n.effects)])
    if m.dim == 2:
        pts = _ball_points(grid_step)
        best_r, best = None, -1.0
        for start in range(0, pts.shape[0], 250_000):
            chunk = pts[start : start + 250_000]
            vals = _cb_sum_at(chunk, deltas_t)
            i = int(vals.argmax())
            if vals[i] > best:
                best, best_r = float(vals[i]), chunk[i].copy()
        r = best_r
        step = grid_step
        while step > 1e-8:
            moved = True
            while moved:
                moved = False
                for k in range(3):
                    for sgn in (1.0, -1.0):
                        cand = r.copy()
                        cand[k] += sgn * step
                        if (cand**2).sum() > 1.0:
                            cand /= np.linalg.norm(cand)
                        val = float(_cb_sum_at(cand[None, :], deltas_t)[0])
                        if val > best + 1e-15:
                            best, r = val, cand
                            moved = True
            step *= 0.5
        paulis = np.array(
            [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
        )
        sigma = 0.5 * (np.eye(2) + np.einsum("k,kab->ab", r, paulis))
        p_e = 0.5 * (1.0 - 0.5 * best)
        return MinErrorPairResult(float(max(p_e, 0.0)), sigma, best, True)

    # d > 2: sampled lower bound on the distance, flagged non-exhaustive
    rng = np.random.default_rng(20250809)
    d = m.dim
    best, best_sigma = -1.0, None
    for _ in range(300):
        a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        sigma = a @ a.conj().T
        sigma /= np.trace(sigma).real
        root = linalg.sqrt_psd(sigma)
        val = sum(linalg.trace_norm(root @ dt @ root) for dt in deltas_t)
        if val > best:
            best, best_sigma = float(val), sigma
    p_e = 0.5 * (1.0 - 0.5 * best)
    return MinErrorPairResult(float(max(p_e, 0.0)), best_sigma, best, False)


@dataclass(frozen=True)
class SimpleDistanceResult:
    value: float
    probe: np.ndarray
    exhaustive: bool


def simple_scheme_distance(m: Povm, n: Povm, grid_deg: float = 1.0) -> SimpleDistanceResult:
    """Largest total-variation distance sum_j |tr((M_j - N_j) rho)| over pure probes.

    Never exceeds the stabilized distance of :func:`minerror_pair`; a strict
    gap means ancillas are genuinely needed. Exhaustive for qubits.
    """
    if m.n_outcomes != n.n_outcomes or m.dim != n.dim:
        raise ValueError("measurements must share outcomes and dimension")
    if m.dim == 2:
        am, bm = _qubit_affine(m)
        an, bn = _qubit_affine(n)
        da, db = am - an, bm - bn

        def g_points(points: np.ndarray) -> np.ndarray:
            return np.abs(da[None, :] + points @ db.T).sum(axis=1)

        def g_angles(theta: float, az: float) -> float:
            p = np.array(
                [[np.sin(theta) * np.cos(az), np.sin(theta) * np.sin(az), np.cos(theta)]]
            )
            return -float(g_points(p)[0])

        pts = _sphere_points(grid_deg)
        vals = g_points(pts)
        i = int(vals.argmax())
        theta0 = float(np.arccos(np.clip(pts[i, 2], -1, 1)))
        az0 = float(np.arctan2(pts[i, 1], pts[i, 0]))
        neg_best, theta, az = _refine_on_sphere(
            g_angles, theta0, az0, np.deg2rad(grid_deg), 1e-10
        )
        probe = linalg.canonical_phase(
            np.array([np.cos(theta / 2), np.exp(1j * az) * np.sin(theta / 2)])
        )
        return SimpleDistanceResult(float(-neg_best), probe, True)

    rng = np.random.default_rng(20250809)
    best, best_v = -1.0, None
    for _ in range(400):
        v = rng.normal(size=m.dim) + 1j * rng.normal(size=m.dim)
        v /= np.linalg.norm(v)
        rho = linalg.proj(v)
        val = float(
            sum(abs(np.trace((e - g) @ rho).real) for e, g in zip(m.effects, n.effects))
        )
        if val > best:
            best, best_v = val, v
    return SimpleDistanceResult(best, linalg.canonical_phase(best_v), False)
