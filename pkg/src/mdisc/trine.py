"""Unambiguous discrimination of two symmetric three-outcome qubit measurements.

One trine is rotated against the other by an angle theta about the z axis.
For a probe with Schmidt weight q the failure probability of any test is
bounded below by

    p_f >= (2 q + sqrt(q^2 + 9 (1-q)^2 + 6 q (1-q) cos theta)) / 3,

and the bound is saturated by an explicit scheme: probe sqrt(q)|00> +
sqrt(1-q)|11>, declare failure on device outcome 1 (its conditional ancilla
states coincide), and unambiguously discriminate the equiprobable conditional
ancilla-state pairs on outcomes 2 and 3, failing with probability equal to
their overlap

    F(q, theta) = |q + 3 e^{i theta} (1 - q)| / (3 - 2 q).

Minimizing over q gives q* = (9 - 2 sqrt(3) cos(theta/2) - 3 cos theta) /
(10 - 6 cos theta); the maximally entangled probe (q = 1/2) is strictly
suboptimal away from the degenerate angles.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .measurements import Povm, TRINE_VECTORS, make_trine, validate_povm
from .qubit import PureStateHypotheses, unambiguous_pure
from .testers import FAIL, Tester, performance, tester_from_protocol


def ziman_bound(
    m: Povm,
    n: Povm,
    priors: tuple[float, float],
    rho: np.ndarray,
) -> float:
    """Failure-probability lower bound for unambiguous discrimination.

    2 sqrt(eta_m eta_n) sum_j || sqrt(M_j^T) rho sqrt(N_j^T) ||_1, the
    block-diagonal evaluation of the trace-norm bound on the device Choi
    operators for a test with normalization rho. Coherences in rho can only
    increase the value; for the trine pair and diagonal rho it reduces to
    :func:`trine_lower_bound`.
    """
    if m.n_outcomes != n.n_outcomes or m.dim != n.dim:
        raise ValueError("measurements must share outcomes and dimension")
    eta_m, eta_n = priors
    if eta_m < 0 or eta_n < 0 or abs(eta_m + eta_n - 1.0) > 1e-10:
        raise ValueError("priors must be a distribution over the two devices")
    rho = linalg.require_density(rho)
    if rho.shape[0] != m.dim:
        raise ValueError("normalization dimension does not match the devices")
    total = 0.0
    for e, g in zip(m.effects, n.effects):
        total += linalg.trace_norm(
            linalg.sqrt_psd(e.T) @ rho @ linalg.sqrt_psd(g.T)
        )
    return float(2.0 * np.sqrt(eta_m * eta_n) * total)


def trine_lower_bound(q: float, theta: float) -> float:
    """Closed form of the bound at Schmidt weight q: only q enters, not coherences."""
    if not 0.0 <= q <= 1.0:
        raise ValueError("Schmidt weight must lie in [0, 1]")
    rad = q * q + 9 * (1 - q) ** 2 + 6 * q * (1 - q) * np.cos(theta)
    return float((2 * q + np.sqrt(max(rad, 0.0))) / 3.0)


def trine_conditional_states(
    q: float, theta: float, outcome: int
) -> tuple[np.ndarray, np.ndarray, float]:
    """Normalized ancilla states heralded by a device outcome, plus their weight.

    Probing with sqrt(q)|00> + sqrt(1-q)|11> and observing outcome j leaves
    the ancilla in sqrt(rho) conj(v_j) (up to normalization), where v_j is the
    trine vector of the device that acted; the outcome weight is the same for
    both devices.
    """
    if outcome not in (0, 1, 2):
        raise ValueError("outcome index must be 0, 1 or 2")
    root = np.diag([np.sqrt(q), np.sqrt(1 - q)]).astype(complex)
    v = TRINE_VECTORS[outcome]
    rot = np.diag([1.0, np.exp(1j * theta)])
    a = root @ np.conj(v)
    b = root @ np.conj(rot @ v)
    weight = (2.0 / 3.0) * float(np.linalg.norm(a) ** 2)
    if np.linalg.norm(a) < 1e-15:
        return a, b, weight
    return a / np.linalg.norm(a), b / np.linalg.norm(b), weight


def trine_overlap(q: float, theta: float) -> float:
    """Overlap of the outcome-2 (equivalently 3) conditional ancilla states.

    Computed directly from the heralded states; algebraically it equals
    |q + 3 e^{i theta}(1 - q)| / (3 - 2 q).
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("Schmidt weight must lie in [0, 1]")
    a, b, _ = trine_conditional_states(q, theta, outcome=1)
    return float(min(abs(np.vdot(a, b)), 1.0))


def trine_protocol_pf(q: float, theta: float) -> float:
    """Failure probability of the explicit scheme: always fail on outcome 1,
    fail with the conditional overlap on outcomes 2 and 3. Saturates
    :func:`trine_lower_bound` for every q."""
    return float(2.0 / 3.0 * q + 2.0 * (3 - 2 * q) / 6.0 * trine_overlap(q, theta))


def _golden_min(f, lo: float, hi: float, xtol: float = 1e-10) -> tuple[float, float]:
    """Golden-section minimizer for a unimodal function on [lo, hi]."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


@dataclass(frozen=True)
class TrineOptimal:
    q_star: float
    p_f: float
    q_numeric: float
    p_f_numeric: float


def trine_optimal(theta: float) -> TrineOptimal:
    """Optimal Schmidt weight and failure probability at rotation angle theta.

    Closed forms:
        q* = (9 - 2 sqrt(3) cos(theta/2) - 3 cos theta) / (10 - 6 cos theta)
        p_f = (1 + sqrt(3)|cos(theta/2)| + (4 - 2 sqrt(3)|cos(theta/2)|)
              / (5 - 3 cos theta)) / 3
    Both are cross-checked against a golden-section minimization of the
    bound. At cos theta = 1 the bound is identically 1, every q is optimal,
    and only the value is compared.
    """
    c = np.cos(theta)
    ch = abs(np.cos(theta / 2.0))
    q_star = float((9.0 - 2.0 * np.sqrt(3.0) * np.cos(theta / 2.0) - 3.0 * c) / (10.0 - 6.0 * c))
    p_f = float((1.0 + np.sqrt(3.0) * ch + (4.0 - 2.0 * np.sqrt(3.0) * ch) / (5.0 - 3.0 * c)) / 3.0)
    q_num, pf_num = _golden_min(lambda q: trine_lower_bound(q, theta), 0.0, 1.0)
    if abs(pf_num - p_f) > 1e-8:
        raise AssertionError(
            f"closed-form failure probability {p_f:.12g} disagrees with the "
            f"numeric minimum {pf_num:.12g} at theta = {theta:.12g}"
        )
    degenerate = c > 1.0 - 1e-9  # flat bound, argmin is the whole interval
    if not degenerate and abs(q_num - q_star) > 1e-6:
        raise AssertionError(
            f"closed-form q* {q_star:.12g} disagrees with numeric argmin "
            f"{q_num:.12g} at theta = {theta:.12g}"
        )
    return TrineOptimal(q_star, p_f, float(q_num), float(pf_num))


def trine_pair(theta: float) -> tuple[Povm, Povm]:
    return make_trine(), make_trine(theta, rotated=True)


def trine_tester(q: float, theta: float) -> Tester:
    """Assemble the saturating scheme as an explicit tester.

    Probe sqrt(q)|00> + sqrt(1-q)|11>; device outcome 1 maps straight to
    failure, outcomes 2 and 3 run the optimal unambiguous discrimination of
    their equiprobable conditional ancilla-state pairs. The result has
    p_e = 0 and p_f = :func:`trine_protocol_pf` at equal priors.
    """
    if not 0.0 <= q <= 1.0:
        raise ValueError("Schmidt weight must lie in [0, 1]")
    probe = np.zeros(4, dtype=complex)
    probe[0], probe[3] = np.sqrt(q), np.sqrt(1 - q)
    always_fail = validate_povm([np.eye(2)])
    conditionals = [always_fail]
    conclusions = [[FAIL]]
    for outcome in (1, 2):
        a, b, _ = trine_conditional_states(q, theta, outcome)
        _, povm = unambiguous_pure(PureStateHypotheses(a, b, eta=0.5))
        conditionals.append(validate_povm(list(povm.effects) + [povm.fail]))
        conclusions.append(["M", "N", FAIL])
    return tester_from_protocol(probe, (2, 2), conditionals, conclusions)


@dataclass(frozen=True)
class TrineSweepRow:
    theta: float
    q_star: float
    pf_optimal: float
    pf_maxent: float
    gap: float


def trine_sweep(thetas: Sequence[float], verify: bool = True) -> list[TrineSweepRow]:
    """Optimal vs maximally entangled failure probability across rotation angles.

    Each row carries q*, the closed-form optimum, the q = 1/2 value, and
    their gap. With ``verify`` the assembled testers are evaluated against
    the actual measurement pair and must reproduce both numbers to 1e-9 with
    no error mass.
    """
    rows = []
    for theta in thetas:
        opt = trine_optimal(theta)
        pf_maxent = trine_lower_bound(0.5, theta)
        gap = pf_maxent - opt.p_f
        if gap < -1e-12:
            raise AssertionError(f"negative entanglement gap {gap:.3e} at theta {theta:.6g}")
        if verify:
            devices = [("M", make_trine()), ("N", make_trine(theta, rotated=True))]
            for q_val, pf_expected in ((opt.q_star, opt.p_f), (0.5, pf_maxent)):
                rep = performance(trine_tester(q_val, theta), devices)
                if abs(rep.p_f - pf_expected) > 1e-9 or rep.p_e > 1e-12:
                    raise AssertionError(
                        f"tester evaluation disagrees at theta={theta:.6g}, q={q_val:.6g}: "
                        f"p_f {rep.p_f:.12g} vs {pf_expected:.12g}, p_e {rep.p_e:.3e}"
                    )
        rows.append(TrineSweepRow(float(theta), opt.q_star, opt.p_f, float(pf_maxent), float(gap)))
    return rows


SWEEP_FIELDS = ("theta", "q_star", "pf_optimal", "pf_maxent", "gap")


def write_sweep_csv(rows: Sequence[TrineSweepRow], path: str) -> None:
    """One row per angle, 12 significant digits."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_FIELDS)
        for r in rows:
            writer.writerow(
                [format(getattr(r, f), ".12g") for f in SWEEP_FIELDS]
            )


def read_sweep_csv(path: str) -> list[TrineSweepRow]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        return [
            TrineSweepRow(**{f: float(row[f]) for f in SWEEP_FIELDS}) for row in reader
        ]
