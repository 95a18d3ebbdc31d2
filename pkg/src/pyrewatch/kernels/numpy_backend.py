"""Pure-numpy kernel implementations (fallback backend).

Same contracts as `numba_backend`: a vectorized ring-averaged conditional
detection curve and the two Monte Carlo drivers.  The curve kernel does the
Poisson-binomial double sum as nested loops over vector slabs, so the
arithmetic volume matches the compiled backend (quadratic in the threshold);
the Monte Carlo drivers loop trials in Python with vectorized field math and
are therefore much slower, which is the price of the fallback.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln

__all__ = ["conditional_detection_curve", "mc_curve_trials", "mc_single_step"]


def _lens_area(r1, r2: float, d):
    """Vectorized two-circle intersection area; r1/d arrays, r2 scalar."""
    r1 = np.asarray(r1, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    small = np.minimum(r1, r2)
    with np.errstate(divide="ignore", invalid="ignore"):
        x1 = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
        x2 = d - x1
        safe_r1 = np.where(r1 > 0.0, r1, 1.0)
        a1 = np.arccos(np.clip(x1 / safe_r1, -1.0, 1.0))
        a2 = np.arccos(np.clip(x2 / r2, -1.0, 1.0))
        lens = (
            r1 * r1 * a1
            + r2 * r2 * a2
            - d * np.sqrt(np.maximum(r1 * r1 - x1 * x1, 0.0))
        )
    out = np.where(
        d >= r1 + r2,
        0.0,
        np.where(d <= np.abs(r1 - r2), math.pi * small * small, lens),
    )
    return np.where((r1 <= 0.0) | (r2 <= 0.0), 0.0, out)


def _pd_given_counts(n_in, n_obs: int, m_thr: int, eps: float):
    """P(>= m_thr positive flags) elementwise over an int array of n_in."""
    n_in = np.asarray(n_in, dtype=np.int64)
    n_out = n_obs - n_in
    if eps <= 0.0:
        return (n_in >= m_thr).astype(np.float64)
    if m_thr == 1:
        return 1.0 - np.power(eps, n_in) * np.power(1.0 - eps, n_out)
    log_e = math.log(eps)
    log_1m = math.log1p(-eps)
    lg_in = gammaln(n_in + 1.0)
    lg_out = gammaln(n_out + 1.0)
    miss = np.zeros(n_in.shape, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        for m_in in range(m_thr):
            ok_in = m_in <= n_in
            lp_in = (
                lg_in
                - gammaln(m_in + 1.0)
                - gammaln(np.maximum(n_in - m_in, 0) + 1.0)
                + m_in * log_1m
                + (n_in - m_in) * log_e
            )
            pmf_in = np.where(ok_in, np.exp(lp_in), 0.0)
            cdf_out = np.zeros_like(miss)
            for j in range(m_thr - m_in):
                ok_out = j <= n_out
                lp_out = (
                    lg_out
                    - gammaln(j + 1.0)
                    - gammaln(np.maximum(n_out - j, 0) + 1.0)
                    + j * log_e
                    + (n_out - j) * log_1m
                )
                cdf_out += np.where(ok_out, np.exp(lp_out), 0.0)
            miss += pmf_in * cdf_out
    return np.clip(1.0 - miss, 0.0, 1.0)


def conditional_detection_curve(
    r_lo, r_hi, r_fire, r_sense, r_hov, lam_m2, n_obs, m_thr, eps, n_quad
):
    r_lo = np.asarray(r_lo, dtype=np.float64)
    r_hi = np.asarray(r_hi, dtype=np.float64)
    r_fire = np.asarray(r_fire, dtype=np.float64)
    r_sense = np.asarray(r_sense, dtype=np.float64)
    idx = np.arange(0, n_quad + 1, dtype=np.float64)
    r = r_lo[:, None] + (r_hi - r_lo)[:, None] * (idx / n_quad)
    nodes = r[:, 1:]
    area = _lens_area(r_sense[:, None], r_hov, nodes) - _lens_area(r_fire[:, None], r_hov, nodes)
    n_in = np.floor(lam_m2 * np.maximum(area, 0.0)).astype(np.int64)
    np.clip(n_in, 0, n_obs, out=n_in)
    pd = _pd_given_counts(n_in, n_obs, m_thr, eps)
    denom = (r_hi * r_hi - r_lo * r_lo)[:, None]
    weights = (nodes ** 2 - r[:, :-1] ** 2) / denom
    return np.clip((weights * pd).sum(axis=1), 0.0, 1.0)


def _wrapped_axis_delta(delta, side: float, torus: bool):
    d = np.abs(delta)
    if torus:
        return np.minimum(d, side - d)
    return d


def _collect_flags(rng, n_cov: int, n_det: int, n_obs: int, m_thr: int, eps: float):
    """Positive-flag count at one stop; returns (positives, collected_detecting)."""
    if n_cov > n_obs:
        n_coll = n_obs
        n_det_s = int(rng.hypergeometric(n_det, n_cov - n_det, n_obs)) if n_det > 0 else 0
    else:
        n_coll = n_cov
        n_det_s = n_det
    if eps <= 0.0:
        return n_det_s, n_det_s
    pos = 0
    if n_det_s > 0:
        pos += int(rng.binomial(n_det_s, 1.0 - eps))
    rest = n_coll - n_det_s
    if rest > 0:
        pos += int(rng.binomial(rest, eps))
    return pos, n_det_s


def mc_curve_trials(
    seeds,
    n_steps,
    side,
    margin,
    torus,
    r_fire,
    r_sense,
    r_lo,
    r_hi,
    r_hov,
    lam_total,
    n_obs,
    m_thr,
    eps,
    p_vv,
    n_uavs,
    grid_rows,
    grid_cols,
):
    n_trials = len(seeds)
    detect = np.zeros(n_trials, dtype=np.int32)
    fa = np.zeros(n_trials, dtype=np.int32)
    col_w = side / grid_cols if grid_cols else side
    row_w = side / grid_rows if grid_rows else side
    rhov2 = r_hov * r_hov
    for t in range(n_trials):
        rng = np.random.default_rng(int(seeds[t]))
        ns = int(rng.poisson(lam_total))
        xs = rng.uniform(0.0, side, ns)
        ys = rng.uniform(0.0, side, ns)
        if torus:
            fx = side * rng.random()
            fy = side * rng.random()
        else:
            fx = margin + (side - 2.0 * margin) * rng.random()
            fy = margin + (side - 2.0 * margin) * rng.random()
        df = np.hypot(
            _wrapped_axis_delta(xs - fx, side, torus),
            _wrapped_axis_delta(ys - fy, side, torus),
        )
        searching = True
        truth_pending = False
        dstep = 0
        nfa = 0
        for k in range(1, n_steps + 1):
            if not searching:
                if rng.random() < p_vv:
                    continue
                if truth_pending:
                    dstep = k
                    break
                searching = True
                continue
            rf = r_fire[k - 1]
            rs = r_sense[k - 1]
            rlo = r_lo[k - 1]
            rhi = r_hi[k - 1]
            if n_uavs == 0:
                continue
            # single alarm channel per step: the first ring-covering stop
            # tests, else stop 0 is the pure-noise collector (the same
            # fleet aggregation the chain model uses)
            ux = uy = None
            truth = False
            for u in range(n_uavs):
                row, col = divmod(u, grid_cols)
                px = (col + rng.random()) * col_w
                py = (row + rng.random()) * row_w
                if u == 0:
                    ux, uy = px, py
                if not truth:
                    duf = math.hypot(
                        float(_wrapped_axis_delta(np.float64(px - fx), side, torus)),
                        float(_wrapped_axis_delta(np.float64(py - fy), side, torus)),
                    )
                    if rlo <= duf <= rhi:
                        truth = True
                        ux, uy = px, py
            du2 = (
                _wrapped_axis_delta(xs - ux, side, torus) ** 2
                + _wrapped_axis_delta(ys - uy, side, torus) ** 2
            )
            covered = df[du2 <= rhov2]
            alive = covered >= rf
            n_cov = int(alive.sum())
            n_det = int((alive & (covered <= rs)).sum())
            pos, _ = _collect_flags(rng, n_cov, n_det, n_obs, m_thr, eps)
            if pos >= m_thr:
                searching = False
                truth_pending = truth
                if not truth:
                    nfa += 1
        detect[t] = dstep
        fa[t] = nfa
    return detect, fa


def mc_single_step(
    seeds,
    side,
    margin,
    torus,
    r_fire,
    r_sense,
    r_lo,
    r_hi,
    r_hov,
    lam_disk,
    n_obs,
    m_thr,
    eps,
    n_uavs,
    grid_rows,
    grid_cols,
):
    n_place = len(seeds)
    det = np.zeros(n_place, dtype=np.uint8)
    fal = np.zeros(n_place, dtype=np.uint8)
    col_w = side / grid_cols if grid_cols else side
    row_w = side / grid_rows if grid_rows else side
    for p in range(n_place):
        rng = np.random.default_rng(int(seeds[p]))
        if torus:
            fx = side * rng.random()
            fy = side * rng.random()
        else:
            fx = margin + (side - 2.0 * margin) * rng.random()
            fy = margin + (side - 2.0 * margin) * rng.random()
        if n_uavs == 0:
            continue
        # single alarm channel, as in the curve simulation
        ux = uy = None
        truth = False
        for u in range(n_uavs):
            row, col = divmod(u, grid_cols)
            px = (col + rng.random()) * col_w
            py = (row + rng.random()) * row_w
            if u == 0:
                ux, uy = px, py
            if not truth:
                duf = math.hypot(
                    float(_wrapped_axis_delta(np.float64(px - fx), side, torus)),
                    float(_wrapped_axis_delta(np.float64(py - fy), side, torus)),
                )
                if r_lo <= duf <= r_hi:
                    truth = True
                    ux, uy = px, py
        cnt = int(rng.poisson(lam_disk))
        if cnt > 0:
            rr = r_hov * np.sqrt(rng.random(cnt))
            ang = rng.uniform(0.0, 2.0 * math.pi, cnt)
            sx = ux + rr * np.cos(ang)
            sy = uy + rr * np.sin(ang)
            dfs = np.hypot(
                _wrapped_axis_delta(sx - fx, side, torus),
                _wrapped_axis_delta(sy - fy, side, torus),
            )
            alive = dfs >= r_fire
            n_cov = int(alive.sum())
            n_det = int((alive & (dfs <= r_sense)).sum())
        else:
            n_cov = 0
            n_det = 0
        pos, _ = _collect_flags(rng, n_cov, n_det, n_obs, m_thr, eps)
        if pos >= m_thr:
            if truth:
                det[p] = 1
            else:
                fal[p] = 1
    return det, fal
