"""Brute-force reference optimizers, independent of the closed-form solvers.

Every searcher here is deliberately dumb: a seeded grid or restart cloud
followed by shrinking coordinate moves, no gradients, no structure borrowed
from the analytic machinery it is meant to check. Agreement between the two
routes is therefore evidence, not tautology. Values are trustworthy to the
declared tolerance of the configuration (1e-3 at the defaults), and every
returned measurement or tester passes the package validators.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .measurements import Povm, validate_povm
from .testers import FAIL, Tester, simple_tester, tester_from_protocol


@dataclass(frozen=True)
class SearchConfig:
    """Reproducible search parameters; identical configs give identical results."""

    sphere_step_deg: float = 2.0
    refine_rounds: int = 4
    shrink: float = 0.25
    restarts: int = 8
    tol: float = 1e-3
    seed: int = 7

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tolerance must be positive")


@dataclass
class OracleResult:
    value: float
    p_s: float
    p_e: float
    p_f: float
    povm: Povm | None = None
    tester: Tester | None = None
    details: dict = field(default_factory=dict)
    config: SearchConfig = field(default_factory=SearchConfig)

    def to_json_dict(self) -> dict:
        out = {
            "value": self.value,
            "p_s": self.p_s,
            "p_e": self.p_e,
            "p_f": self.p_f,
            "details": _jsonable(self.details),
            "config": asdict(self.config),
        }
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return [_jsonable(v) for v in obj.tolist()]
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def write_report(result: OracleResult, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(result.to_json_dict(), fh, indent=2)


# -- generic search helpers ---------------------------------------------------


def _sphere_points(step_deg: float) -> np.ndarray:
    step = np.deg2rad(step_deg)
    thetas = np.arange(0.0, np.pi + step / 2, step)
    azims = np.arange(0.0, 2 * np.pi, step)
    tt, pp = np.meshgrid(thetas, azims, indexing="ij")
    return np.stack(
        [np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1
    ).reshape(-1, 3)


def _angles_to_point(theta: float, az: float) -> np.ndarray:
    return np.array(
        [np.sin(theta) * np.cos(az), np.sin(theta) * np.sin(az), np.cos(theta)]
    )


def _refine_sphere(
    f: Callable[[float, float], float],
    theta: float,
    az: float,
    step0: float,
    cfg: SearchConfig,
) -> tuple[float, float, float]:
    """Shrinking local moves on the sphere, maximizing f."""
    cur = f(theta, az)
    step = step0
    for _ in range(cfg.refine_rounds):
        step *= cfg.shrink
        moved = True
        while moved:
            moved = False
            for dt, dp in ((step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)):
                cand = f(theta + dt, az + dp)
                if cand > cur + 1e-18:
                    cur, theta, az = cand, theta + dt, az + dp
                    moved = True
    return cur, theta, az


def _coordinate_ascent(
    f: Callable[[np.ndarray], float],
    x0: np.ndarray,
    step0: float = 0.25,
    min_step: float = 5e-3,
    max_passes: int = 6,
) -> tuple[float, np.ndarray]:
    """Cyclic coordinate moves with shrinking steps, maximizing f."""
    x = np.array(x0, dtype=float)
    cur = f(x)
    step = step0
    while step > min_step:
        for _ in range(max_passes):
            improved = False
            for k in range(x.size):
                for sgn in (1.0, -1.0):
                    cand = x.copy()
                    cand[k] += sgn * step
                    val = f(cand)
                    if val > cur + 1e-15:
                        cur, x = val, cand
                        improved = True
            if not improved:
                break
        step *= 0.5
    return cur, x


def _bloch_state(point: np.ndarray) -> np.ndarray:
    paulis = np.array(
        [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
    )
    return 0.5 * (np.eye(2) + np.einsum("k,kab->ab", point, paulis))


def _unit_qubit(theta: float, az: float) -> np.ndarray:
    return np.array([np.cos(theta / 2), np.exp(1j * az) * np.sin(theta / 2)])


# -- min sum of outcome-probability overlaps ----------------------------------


def oracle_min_sum_overlap(m: Povm, n: Povm, cfg: SearchConfig = SearchConfig()) -> OracleResult:
    """Minimize sum_j tr(M_j rho) tr(N_j rho) over pure qubit probes.

    A vanishing minimum is the exact condition for an ancilla-free scheme to
    discriminate the devices perfectly.
    """
    if m.dim != 2 or n.dim != 2:
        raise ValueError("overlap search covers qubit devices only")
    am = np.array([float(np.trace(e).real) / 2 for e in m.effects])
    an = np.array([float(np.trace(e).real) / 2 for e in n.effects])
    paulis = np.array(
        [[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex
    )
    bm = np.array([[float(np.trace(e @ s).real) / 2 for s in paulis] for e in m.effects])
    bn = np.array([[float(np.trace(e @ s).real) / 2 for s in paulis] for e in n.effects])

    def value_points(points: np.ndarray) -> np.ndarray:
        mu = am[None, :] + points @ bm.T
        nu = an[None, :] + points @ bn.T
        return (mu * nu).sum(axis=1)

    pts = _sphere_points(cfg.sphere_step_deg)
    vals = value_points(pts)
    i = int(vals.argmin())
    theta = float(np.arccos(np.clip(pts[i, 2], -1, 1)))
    az = float(np.arctan2(pts[i, 1], pts[i, 0]))

    neg, theta, az = _refine_sphere(
        lambda t, p: -float(value_points(_angles_to_point(t, p)[None, :])[0]),
        theta,
        az,
        np.deg2rad(cfg.sphere_step_deg),
        cfg,
    )
    probe = linalg.canonical_phase(_unit_qubit(theta, az))
    best = max(-neg, 0.0)
    return OracleResult(
        value=float(best),
        p_s=float("nan"),
        p_e=float("nan"),
        p_f=float("nan"),
        details={"probe": probe, "theta": theta, "azimuth": az},
        config=cfg,
    )


# -- state-discrimination searches --------------------------------------------


def _normalize_povm_params(x: np.ndarray, m: int) -> list[np.ndarray] | None:
    """Effects a_k |chi_k><chi_k| squeezed through T^{-1/2} . T^{-1/2} to sum to I."""
    effects = []
    for k in range(m):
        a = np.clip(x[3 * k], 0.0, 1.0)
        chi = _unit_qubit(x[3 * k + 1], x[3 * k + 2])
        effects.append(a * np.outer(chi, chi.conj()))
    t = sum(effects)
    w, v = np.linalg.eigh(t)
    if w[0] < 1e-9:
        return None
    inv_root = (v * (1.0 / np.sqrt(w))) @ v.conj().T
    return [inv_root @ e @ inv_root for e in effects]


def oracle_state_povm(
    states: Sequence[np.ndarray],
    priors: Sequence[float],
    mode: str,
    cfg: SearchConfig = SearchConfig(),
    p_f: float | None = None,
) -> OracleResult:
    """Search qubit state-discrimination POVMs directly.

    Modes: ``min-error`` (rank-one effects renormalized onto the POVM
    constraint set, best p_e), ``unambiguous`` (effects pinned to the
    opposing-state kernels, exact feasibility boundary, best p_f) and
    ``fixed-failure`` (conclusive rank-one effects with the overall scale
    solved so the failure rate hits ``p_f`` exactly, best p_s).
    """
    rhos = [linalg.require_density(r) for r in states]
    if any(r.shape[0] != 2 for r in rhos):
        raise ValueError("state searches cover qubit hypotheses only")
    if len(rhos) > 4:
        raise ValueError("at most four hypotheses are supported")
    eta = np.asarray(priors, dtype=float)
    if abs(eta.sum() - 1.0) > 1e-10 or np.any(eta < 0):
        raise ValueError("priors must form a distribution")
    rng = np.random.default_rng(cfg.seed)
    m = len(rhos)

    if mode == "min-error":

        def score(x: np.ndarray) -> float:
            effects = _normalize_povm_params(x, m)
            if effects is None:
                return -np.inf
            return sum(
                float(e_k * np.trace(eff @ rho).real)
                for e_k, eff, rho in zip(eta, effects, rhos)
            )

        starts = []
        top = []
        for rho in rhos:
            w, v = np.linalg.eigh(rho)
            vec = v[:, -1]
            theta = 2 * np.arccos(np.clip(abs(vec[0]), 0, 1))
            az = float(np.angle(vec[1]) - np.angle(vec[0])) if abs(vec[1]) > 1e-12 else 0.0
            top.extend([1.0, theta, az % (2 * np.pi)])
        starts.append(np.array(top))
        for _ in range(cfg.restarts):
            x = rng.uniform(size=3 * m) * np.tile([1.0, np.pi, 2 * np.pi], m)
            starts.append(x)
        best, best_x = -np.inf, None
        for x0 in starts:
            val, x = _coordinate_ascent(score, x0)
            if val > best:
                best, best_x = val, x
        effects = _normalize_povm_params(best_x, m)
        povm = validate_povm(effects)
        p_s = best
        return OracleResult(
            value=float(1 - p_s),
            p_s=float(p_s),
            p_e=float(1 - p_s),
            p_f=0.0,
            povm=povm,
            details={"params": best_x},
            config=cfg,
        )

    if mode == "unambiguous":
        if m != 2:
            raise ValueError("unambiguous search covers two hypotheses")
        kernels = []
        for rho in rhos:
            w, v = np.linalg.eigh(rho)
            kernels.append(v[:, 0] if w[0] <= 1e-10 else None)
        if kernels[0] is None and kernels[1] is None:
            raise ValueError("both hypotheses are full rank: no unambiguous conclusions")
        u0 = kernels[1]  # direction available for concluding hypothesis 0
        u1 = kernels[0]
        gain0 = float(np.real(u0.conj() @ rhos[0] @ u0)) * eta[0] if u0 is not None else 0.0
        gain1 = float(np.real(u1.conj() @ rhos[1] @ u1)) * eta[1] if u1 is not None else 0.0
        if u0 is None:
            alpha, beta, conclusive = 0.0, 1.0, gain1
        elif u1 is None:
            alpha, beta, conclusive = 1.0, 0.0, gain0
        else:
            t = float(abs(np.vdot(u0, u1)) ** 2)
            alphas = np.linspace(0.0, 1.0, 20001)
            betas = (1.0 - alphas) / np.clip(1.0 - alphas * (1.0 - t), 1e-15, None)
            vals = gain0 * alphas + gain1 * np.clip(betas, 0.0, 1.0)
            i = int(vals.argmax())
            alpha, beta, conclusive = float(alphas[i]), float(np.clip(betas[i], 0, 1)), float(vals[i])
        e0 = alpha * np.outer(u0, u0.conj()) if u0 is not None else np.zeros((2, 2), complex)
        e1 = beta * np.outer(u1, u1.conj()) if u1 is not None else np.zeros((2, 2), complex)
        e_f = np.eye(2) - e0 - e1
        povm = validate_povm([e0, e1, e_f])
        p_f = 1.0 - conclusive
        return OracleResult(
            value=float(p_f),
            p_s=float(conclusive),
            p_e=0.0,
            p_f=float(p_f),
            povm=povm,
            details={"alpha": alpha, "beta": beta},
            config=cfg,
        )

    if mode == "fixed-failure":
        if m != 2:
            raise ValueError("fixed-failure search covers two hypotheses")
        if p_f is None or not 0.0 <= p_f <= 1.0:
            raise ValueError("a target failure rate in [0, 1] is required")
        target = float(p_f)
        w_avg = eta[0] * rhos[0] + eta[1] * rhos[1]
        gain = eta[0] * rhos[0] - eta[1] * rhos[1]

        def assemble(x: np.ndarray):
            """Inconclusive effect on the exact failure-rate segment, then the
            best conclusive split with a rank-one (or all-or-nothing) first effect."""
            xi = _unit_qubit(x[0], x[1])
            p1 = np.outer(xi, xi.conj())
            p2 = np.eye(2) - p1
            w1 = float(np.trace(p1 @ w_avg).real)
            w2 = float(np.trace(p2 @ w_avg).real)
            # endpoints of {b in [0,1]^2 : w1 b1 + w2 b2 = target}
            ends = []
            if w1 > 1e-14 and target / w1 <= 1.0 + 1e-12:
                ends.append((min(target / w1, 1.0), 0.0))
            elif w2 > 1e-14 and (target - w1) / w2 <= 1.0 + 1e-12:
                ends.append((1.0, min((target - w1) / w2, 1.0)))
            if w2 > 1e-14 and target / w2 <= 1.0 + 1e-12:
                ends.append((0.0, min(target / w2, 1.0)))
            elif w1 > 1e-14 and (target - w2) / w1 <= 1.0 + 1e-12:
                ends.append((min((target - w2) / w1, 1.0), 1.0))
            if not ends:
                return None
            u = np.clip(x[2], 0.0, 1.0)
            b1 = (1 - u) * ends[0][0] + u * ends[-1][0]
            b2 = (1 - u) * ends[0][1] + u * ends[-1][1]
            e_f = b1 * p1 + b2 * p2
            s = np.eye(2) - e_f
            chi = _unit_qubit(x[3], x[4])
            # largest a with a|chi><chi| <= S
            sw, sv = np.linalg.eigh(s)
            comp = np.abs(sv.conj().T @ chi) ** 2
            if np.any((sw <= 1e-12) & (comp > 1e-12)):
                a_max = 0.0
            else:
                a_max = 1.0 / float(np.sum(comp / np.clip(sw, 1e-12, None)))
            slope = float(np.real(chi.conj() @ gain @ chi))
            base = eta[1] * float(np.trace(s @ rhos[1]).real)
            candidates = [
                (base + a_max * slope if a_max > 0 else -np.inf, "rank1"),
                (base, "none"),
                (eta[0] * float(np.trace(s @ rhos[0]).real), "all"),
            ]
            val, kind = max(candidates, key=lambda c: c[0])
            return val, (e_f, s, chi, a_max, kind)

        def score(x: np.ndarray) -> float:
            built = assemble(x)
            return built[0] if built is not None else -np.inf

        starts = [np.array([np.pi / 2, 0.0, 0.0, np.pi / 2, 0.0])]
        for rho in (w_avg / np.trace(w_avg).real, rhos[0], rhos[1]):
            w, v = np.linalg.eigh(rho)
            vec = v[:, -1]
            th = 2 * np.arccos(np.clip(abs(vec[0]), 0, 1))
            az = float(np.angle(vec[1]) - np.angle(vec[0])) if abs(vec[1]) > 1e-12 else 0.0
            starts.append(np.array([th, az % (2 * np.pi), 0.0, (th + np.pi / 2) % np.pi, az]))
        for _ in range(cfg.restarts):
            starts.append(
                rng.uniform(size=5)
                * np.array([np.pi, 2 * np.pi, 1.0, np.pi, 2 * np.pi])
            )
        best, best_x = -np.inf, None
        for x0 in starts:
            val, x = _coordinate_ascent(score, x0, min_step=1e-4)
            if val > best:
                best, best_x = val, x
        if best_x is None or not np.isfinite(best):
            raise ValueError(f"no POVM with failure rate {target:g} was found")
        p_s, (e_f, s, chi, a_max, kind) = assemble(best_x)
        if kind == "rank1":
            e0 = a_max * np.outer(chi, chi.conj())
        elif kind == "none":
            e0 = np.zeros((2, 2), dtype=complex)
        else:
            e0 = s
        e1 = s - e0
        povm = validate_povm([e0, e1, e_f], tol=1e-8)
        return OracleResult(
            value=float(p_s),
            p_s=float(p_s),
            p_e=float(max(1 - p_s - target, 0.0)),
            p_f=target,
            povm=povm,
            details={"params": best_x, "split": kind},
            config=cfg,
        )

    raise ValueError(f"unknown mode {mode!r}")


# -- measurement-discrimination searches --------------------------------------


def _triangular_layout(d: int):
    """Index layout of a lower-triangular probe factor: real diagonal entries,
    (re, im) pairs below the diagonal."""
    diag, off = [], []
    k = 0
    for i in range(d):
        diag.append((i, k))
        k += 1
        for j in range(i):
            off.append((i, j, k, k + 1))
            k += 2
    return diag, off, k


def _batch_probe_matrices(x: np.ndarray, d: int) -> np.ndarray:
    """Probe factors R (batch, d, d) from triangular parameters, Frobenius normalized.

    The probe is the purification sum_{ia} R_{ia} |i a>; right-multiplying R by
    a unitary is an ancilla basis change absorbed by the conditional
    measurements, so the triangular gauge loses no strategies.
    """
    diag, off, n_par = _triangular_layout(d)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[1] != n_par:
        raise ValueError(f"expected {n_par} probe parameters, got {x.shape[1]}")
    r = np.zeros((x.shape[0], d, d), dtype=complex)
    for i, k in diag:
        r[:, i, i] = x[:, k]
    for i, j, kr, ki in off:
        r[:, i, j] = x[:, kr] + 1j * x[:, ki]
    nrm = np.sqrt((np.abs(r) ** 2).sum(axis=(1, 2)))
    nrm = np.clip(nrm, 1e-12, None)
    return r / nrm[:, None, None]


def _effect_kernels(povm: Povm, tol: float = 1e-9) -> list[np.ndarray | None]:
    """Orthonormal kernel basis of each effect, or None for full-rank effects."""
    out = []
    for e in povm.effects:
        w, v = np.linalg.eigh(e)
        cols = v[:, np.abs(w) <= tol]
        out.append(cols if cols.shape[1] else None)
    return out


def _batch_kernel_gain(
    r: np.ndarray,
    r_pinv: np.ndarray,
    kern: np.ndarray | None,
    w_gain: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Best rank-one conclusive direction constrained to ker(conj(R^dag B R)).

    The kernel of the heralded operator is the image of ker(B) under R^{-1}
    (conjugated), which is exact for every probe factor; the gain direction is
    the top eigenvector of the kernel-compressed gain operator.
    """
    nb, d, _ = r.shape
    if kern is None:
        return np.zeros(nb), np.zeros((nb, d), dtype=complex)
    basis = np.einsum("nij,jk->nik", r_pinv, kern).conj()
    # orthonormalize the per-sample kernel basis columns
    q, rr = np.linalg.qr(basis)
    keep = np.abs(np.einsum("nkk->nk", rr)) > 1e-11
    q = q * keep[:, None, :]
    g = np.einsum("nik,nij,njl->nkl", q.conj(), w_gain, q)
    vals, vecs = np.linalg.eigh(g)
    gain = np.clip(vals[:, -1].real, 0.0, None)
    direction = np.einsum("nik,nk->ni", q, vecs[:, :, -1])
    nrm = np.clip(np.linalg.norm(direction, axis=1), 1e-15, None)
    return gain, direction / nrm[:, None]


def _batch_zero_error_pair(
    gain_m: np.ndarray, u: np.ndarray, gain_n: np.ndarray, v: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Optimal weights (alpha, beta) for rank-one zero-error effects along u, v.

    Feasibility of I - alpha uu^dag - beta vv^dag is
    1 - alpha - beta + alpha beta (1 - t) >= 0 with t = |<u|v>|^2; the linear
    objective is maximized on that boundary, where the stationary point is
    explicit.
    """
    t = np.abs(np.einsum("ni,ni->n", u.conj(), v)) ** 2
    # endpoint candidates (alpha, beta) = (0, 1) and (1, 0)
    best = np.maximum(gain_n, gain_m)
    alpha = np.where(gain_m >= gain_n, 1.0, 0.0)
    beta = 1.0 - alpha
    with np.errstate(divide="ignore", invalid="ignore"):
        a_star = (1.0 - np.sqrt(np.where(gain_m > 0, gain_n * t / np.clip(gain_m, 1e-300, None), np.inf))) / np.clip(1.0 - t, 1e-15, None)
    ok = (t < 1.0 - 1e-12) & (gain_m > 0) & (a_star > 0) & (a_star < 1)
    a = np.where(ok, np.clip(a_star, 0.0, 1.0), 0.0)
    b = np.clip((1.0 - a) / np.clip(1.0 - a * (1.0 - t), 1e-15, None), 0.0, 1.0)
    v_star = np.where(ok, gain_m * a + gain_n * b, -np.inf)
    better = v_star > best
    alpha = np.where(better, a, alpha)
    beta = np.where(better, b, beta)
    return np.maximum(best, v_star), alpha, beta


def _de_maximize(batch_score, n_par: int, cfg: SearchConfig, maxiter: int):
    """Vectorized differential evolution, deterministic in the configured seed."""
    from scipy.optimize import differential_evolution

    def negated(x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            return float(-batch_score(x[None, :])[0])
        return -batch_score(x.T)

    res = differential_evolution(
        negated,
        bounds=[(-1.0, 1.0)] * n_par,
        seed=cfg.seed,
        maxiter=maxiter,
        popsize=24,
        tol=1e-10,
        mutation=(0.4, 1.0),
        recombination=0.85,
        vectorized=True,
        updating="deferred",
        polish=True,
    )
    return float(-res.fun), np.asarray(res.x, dtype=float)


def oracle_measurement_discrimination(
    measurements: Sequence[Povm],
    priors: Sequence[float],
    scheme: str,
    mode: str,
    cfg: SearchConfig = SearchConfig(),
) -> OracleResult:
    """Search discrimination strategies for measurement devices directly.

    ``simple``: pure qubit probes on a sphere grid, exact deterministic
    post-processing per outcome (min-error) or exact zero-error assignments
    (unambiguous).

    ``ancilla``: bipartite pure probes for two devices in dimension up to 5,
    parametrized by a triangular probe factor (the ancilla basis is gauge);
    per device outcome the heralded ancilla-state pair is discriminated
    exactly (weighted two-state minimum error, or the zero-error boundary).
    """
    eta = np.asarray(priors, dtype=float)
    if abs(eta.sum() - 1.0) > 1e-10 or np.any(eta < 0):
        raise ValueError("priors must form a distribution")
    if len(measurements) != len(eta):
        raise ValueError("one prior per device required")
    n = measurements[0].n_outcomes
    d = measurements[0].dim
    if any(dev.n_outcomes != n or dev.dim != d for dev in measurements):
        raise ValueError("devices must share outcomes and dimension")
    rng = np.random.default_rng(cfg.seed)

    if scheme == "simple":
        if d != 2:
            raise ValueError("simple-scheme search covers qubit devices only")
        labels = [f"M{l + 1}" for l in range(len(measurements))]

        def conclusive(rho: np.ndarray) -> tuple[float, list[str]]:
            probs = np.array([[float(np.trace(e @ rho).real) for e in dev.effects]
                              for dev in measurements])
            assignment = []
            total = 0.0
            for j in range(n):
                col = probs[:, j]
                if mode == "min-error":
                    l = int(np.argmax(eta * col))
                    total += float(eta[l] * col[l])
                    assignment.append(labels[l])
                else:  # unambiguous: a conclusion must be impossible for every rival
                    allowed = [
                        l
                        for l in range(len(measurements))
                        if max(np.delete(col, l), initial=0.0) <= 1e-12
                    ]
                    if allowed:
                        l = max(allowed, key=lambda l: eta[l] * col[l])
                        total += float(eta[l] * col[l])
                        assignment.append(labels[l])
                    else:
                        assignment.append(FAIL)
            return total, assignment

        def f(theta: float, az: float) -> float:
            return conclusive(_bloch_state(_angles_to_point(theta, az)))[0]

        pts = _sphere_points(cfg.sphere_step_deg)
        vals = np.array([conclusive(_bloch_state(p))[0] for p in pts])
        i = int(vals.argmax())
        theta = float(np.arccos(np.clip(pts[i, 2], -1, 1)))
        az = float(np.arctan2(pts[i, 1], pts[i, 0]))
        best, theta, az = _refine_sphere(f, theta, az, np.deg2rad(cfg.sphere_step_deg), cfg)
        probe = linalg.canonical_phase(_unit_qubit(theta, az))
        _, assignment = conclusive(linalg.proj(probe))
        tester = simple_tester(probe, assignment)
        p_s = best
        p_f = (1.0 - p_s) if mode == "unambiguous" else 0.0
        value = p_f if mode == "unambiguous" else 1.0 - p_s
        return OracleResult(
            value=float(value),
            p_s=float(p_s),
            p_e=float(1 - p_s - p_f),
            p_f=float(p_f),
            tester=tester,
            details={"probe": probe, "theta": theta, "azimuth": az,
                     "assignment": assignment},
            config=cfg,
        )

    if scheme == "ancilla":
        if len(measurements) != 2:
            raise ValueError("ancilla-scheme search covers two devices")
        if d > 5:
            raise ValueError("ancilla-scheme search covers dimension up to 5")
        dev_m, dev_n = measurements
        kern_m = _effect_kernels(dev_m)
        kern_n = _effect_kernels(dev_n)
        _, _, n_par = _triangular_layout(d)

        def heralded(r: np.ndarray, effect: np.ndarray, weight: float) -> np.ndarray:
            rd = r.conj().transpose(0, 2, 1)
            return weight * np.conj(rd @ effect @ r)

        def batch_score(x: np.ndarray) -> np.ndarray:
            r = _batch_probe_matrices(x, d)
            r_pinv = np.linalg.pinv(r)
            total = np.zeros(r.shape[0])
            for j in range(n):
                w_m = heralded(r, dev_m.effects[j], eta[0])
                w_n = heralded(r, dev_n.effects[j], eta[1])
                if mode == "min-error":
                    diff = np.linalg.eigvalsh(w_m - w_n)
                    total += np.einsum("nii->n", w_n).real + np.where(diff > 0, diff, 0).sum(axis=1)
                else:
                    gm, u = _batch_kernel_gain(r, r_pinv, kern_n[j], w_m)
                    gn, v = _batch_kernel_gain(r, r_pinv, kern_m[j], w_n)
                    val, _, _ = _batch_zero_error_pair(gm, u, gn, v)
                    total += val
            return total

        maxiter = 120 if mode == "min-error" else 250
        best, best_x = _de_maximize(batch_score, n_par, cfg, maxiter)

        r = _batch_probe_matrices(best_x[None, :], d)
        r_pinv = np.linalg.pinv(r)
        sigma = (r[0] @ r[0].conj().T)
        conditionals, conclusions = [], []
        for j in range(n):
            w_m = heralded(r, dev_m.effects[j], eta[0])
            w_n = heralded(r, dev_n.effects[j], eta[1])
            if mode == "min-error":
                e_m = _positive_part(w_m[0] - w_n[0])
                conditionals.append(validate_povm([e_m, np.eye(d) - e_m]))
                conclusions.append(["M", "N"])
            else:
                gm, u = _batch_kernel_gain(r, r_pinv, kern_n[j], w_m)
                gn, v = _batch_kernel_gain(r, r_pinv, kern_m[j], w_n)
                _, alpha, beta = _batch_zero_error_pair(gm, u, gn, v)
                e_m = alpha[0] * np.outer(u[0], u[0].conj())
                e_n = beta[0] * np.outer(v[0], v[0].conj())
                conditionals.append(
                    validate_povm([e_m, e_n, np.eye(d) - e_m - e_n], tol=1e-8)
                )
                conclusions.append(["M", "N", FAIL])
        tester = tester_from_protocol(r[0].reshape(-1), (d, d), conditionals, conclusions)
        # report from an exact evaluation of the assembled tester
        from .testers import performance as _perf

        rep = _perf(tester, [("M", dev_m), ("N", dev_n)], priors=list(eta))
        value = rep.p_f if mode == "unambiguous" else rep.p_e
        return OracleResult(
            value=float(value),
            p_s=rep.p_s,
            p_e=rep.p_e,
            p_f=rep.p_f,
            tester=tester,
            details={
                "sigma": sigma,
                "schmidt_weights": np.linalg.eigvalsh(sigma),
                "search_value": best,
            },
            config=cfg,
        )

    raise ValueError(f"unknown scheme {scheme!r}")


def _positive_part(h: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(h)
    sel = w > 0
    if not np.any(sel):
        return np.zeros_like(h)
    vs = v[:, sel]
    return vs @ vs.conj().T
