"""Pure-Python (numpy) reference kernels.

These are the fallback implementations of the three hot loops:

* ``gap_map_sums``      — the three self-consistency momentum sums,
* ``correlator_series`` — hopping/pairing correlators on a time grid,
* ``basis_grid_scan``   — measurement-basis grid scan for the classical
  correlation optimizer.

Reductions over momentum use ``math.fsum`` (exact, correctly-rounded
summation), which makes every mode sum independent of evaluation order
and therefore bitwise reproducible.  The compiled backend in
``_kernels.pyx`` implements the same contracts with fixed-order
compensated loops; the two backends agree to rounding but are not
required to be bitwise identical with each other.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["BACKEND", "gap_map_sums", "correlator_series", "basis_grid_scan"]

BACKEND = "python"

_LOG2 = math.log(2.0)


def gap_map_sums(a, b, eps, cos_q, sin_q):
    """Momentum sums feeding the self-consistency map.

    All inputs are positive-mode arrays in ascending-q order.  Returns
    the tuple of exact sums

        (Σ A_q/ε_q,  Σ cos(q)·A_q/ε_q,  Σ sin(q)·B_q/ε_q).
    """
    ratio_a = a / eps
    ratio_b = b / eps
    s1 = math.fsum(ratio_a)
    s2 = math.fsum(cos_q * ratio_a)
    s3 = math.fsum(sin_q * ratio_b)
    return s1, s2, s3


def correlator_series(q, eps, cos2f, sin2f, cos2phi, sin2phi, hop_m, pair_m, times):
    """Mode sums of the quench correlators on a time grid.

    Parameters
    ----------
    q, eps : ndarray
        Positive momenta (ascending) and post-quench mode energies.
    cos2f, sin2f : ndarray
        cos(2θ_q^F) and sin(2θ_q^F) per positive mode.
    cos2phi, sin2phi : ndarray
        cos(2Φ_q) and sin(2Φ_q) per positive mode.
    hop_m, pair_m : sequence of int
        Distances for the hopping (m ≥ 0) and pairing (m ≥ 1) sums.
    times : ndarray
        Times at which to evaluate.

    Returns
    -------
    (hop, pair) : (ndarray, ndarray)
        ``hop[it, k]`` = Σ_{q>0} cos(q m_k)·[1 − cos2θ^F cos2Φ
        − sin2θ^F sin2Φ cos(2 ε_q t)] and ``pair[it, k]`` =
        Σ_{q>0} sin(q m_k)·[sin2θ^F cos2Φ − cos2θ^F sin2Φ cos(2 ε_q t)
        − i sin2Φ sin(2 ε_q t)].  No 1/N prefactor is applied here.
    """
    times = np.asarray(times, dtype=float)
    hop_m = list(hop_m)
    pair_m = list(pair_m)
    n_t = times.size
    hop = np.empty((n_t, len(hop_m)))
    pair = np.empty((n_t, len(pair_m)), dtype=complex)

    cos_qm = {m: np.cos(q * m) for m in hop_m}
    sin_qm = {m: np.sin(q * m) for m in pair_m}
    static_hop = 1.0 - cos2f * cos2phi
    osc_hop = sin2f * sin2phi
    static_pair = sin2f * cos2phi
    osc_pair = cos2f * sin2phi

    for it, t in enumerate(times):
        cos_et = np.cos((2.0 * t) * eps)
        sin_et = np.sin((2.0 * t) * eps)
        for k, m in enumerate(hop_m):
            hop[it, k] = math.fsum(cos_qm[m] * (static_hop - osc_hop * cos_et))
        for k, m in enumerate(pair_m):
            re = math.fsum(sin_qm[m] * (static_pair - osc_pair * cos_et))
            im = -math.fsum(sin_qm[m] * (sin2phi * sin_et))
            pair[it, k] = complex(re, im)
    return hop, pair


def _binary_entropy(p):
    """H₂(p) in bits, elementwise, with 0·log0 = 0."""
    p = np.clip(p, 0.0, 1.0)
    out = np.zeros_like(p)
    mask = (p > 0.0) & (p < 1.0)
    pm = p[mask]
    out[mask] = -(pm * np.log(pm) + (1.0 - pm) * np.log(1.0 - pm)) / _LOG2
    return out


def conditional_entropy_grid(c1, c2, c3, c4, cos_t, sin_t, cos_p, sin_p):
    """Measurement-conditional entropy on an outer (θ, φ) grid.

    Returns the (n_theta, n_phi) array of p₀S(ρ₀) + p₁S(ρ₁) for a
    measurement along n̂(θ, φ) on the second site of an X state with
    correlation coefficients (c1..c4).
    """
    nx = np.outer(sin_t, cos_p)
    ny = np.outer(sin_t, sin_p)
    nz = cos_t[:, None] * np.ones_like(cos_p)[None, :]
    cond = np.zeros_like(nx)
    for sgn in (1.0, -1.0):
        denom = 1.0 + sgn * c4 * nz
        prob = 0.5 * denom
        safe = np.where(denom > 1e-300, denom, 1.0)
        chi1 = c1 * nx / safe
        chi2 = c2 * ny / safe
        chi3 = (sgn * c3 * nz + c4) / safe
        radius = np.sqrt(chi1 * chi1 + chi2 * chi2 + chi3 * chi3)
        entropy = _binary_entropy(0.5 * (1.0 + np.minimum(radius, 1.0)))
        cond += np.where(prob > 0.0, prob * entropy, 0.0)
    return cond


def basis_grid_scan(c1, c2, c3, c4, thetas, phis, theta_block=128):
    """Minimize the conditional entropy over a (θ, φ) measurement grid.

    The scan runs θ-major, φ-minor; ties keep the first (smallest θ,
    then smallest φ) grid point.  ``theta_block`` rows are evaluated at
    a time so that dense oracle grids stay within memory.

    Returns
    -------
    (value, i_theta, i_phi) : (float, int, int)
        Minimum conditional entropy in bits and its grid indices.
    """
    thetas = np.asarray(thetas, dtype=float)
    phis = np.asarray(phis, dtype=float)
    cos_p = np.cos(phis)
    sin_p = np.sin(phis)
    best = math.inf
    best_it = best_ip = 0
    for start in range(0, thetas.size, theta_block):
        block = thetas[start : start + theta_block]
        cond = conditional_entropy_grid(
            c1, c2, c3, c4, np.cos(block), np.sin(block), cos_p, sin_p
        )
        flat = int(np.argmin(cond))
        it, ip = divmod(flat, phis.size)
        value = float(cond[it, ip])
        if value < best:
            best = value
            best_it = start + it
            best_ip = ip
    return best, best_it, best_ip
