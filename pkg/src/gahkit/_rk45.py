"""Adaptive Dormand-Prince 5(4) integration core.

Two drivers share the same stepper arithmetic:

* :func:`solve_dense` integrates one trajectory, recording every accepted
  step together with the data needed for cubic-Hermite dense output.
* :func:`solve_events` advances a whole batch of seeds, each with its own
  adaptive step size, detecting section crossings per seed.  Every per-seed
  decision uses only that seed's data, so a batch run is arithmetically
  identical to running the seeds one at a time.

Fields are callables ``f(t, y) -> dy`` that accept ``y`` of shape ``(3,)``
or ``(n, 3)`` (``t`` scalar or ``(n,)``) and broadcast accordingly.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonFiniteState, StepSizeUnderflow

# Butcher tableau (Dormand & Prince 1980), 5th-order propagation with a
# 4th-order error estimate from the FSAL stage.
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9

_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = (
    9017 / 3168,
    -355 / 33,
    46732 / 5247,
    49 / 176,
    -5103 / 18656,
)
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
_EPS = np.finfo(float).eps
_BISECT_ITERS = 70


def _stages(rhs, t, y, h):
    """One embedded RK step for every row of ``y``.

    Returns ``(y_new, k1, k7, err)`` where ``err`` is the local error
    estimate of the 5th-order solution.
    """
    hh = h[:, None]
    k1 = rhs(t, y)
    k2 = rhs(t + _C2 * h, y + hh * (_A21 * k1))
    k3 = rhs(t + _C3 * h, y + hh * (_A31 * k1 + _A32 * k2))
    k4 = rhs(t + _C4 * h, y + hh * (_A41 * k1 + _A42 * k2 + _A43 * k3))
    k5 = rhs(t + _C5 * h, y + hh * (_A51 * k1 + _A52 * k2 + _A53 * k3 + _A54 * k4))
    k6 = rhs(
        t + h,
        y + hh * (_A61 * k1 + _A62 * k2 + _A63 * k3 + _A64 * k4 + _A65 * k5),
    )
    y_new = y + hh * (_B1 * k1 + _B3 * k3 + _B4 * k4 + _B5 * k5 + _B6 * k6)
    k7 = rhs(t + h, y_new)
    err = hh * (_E1 * k1 + _E3 * k3 + _E4 * k4 + _E5 * k5 + _E6 * k6 + _E7 * k7)
    return y_new, k1, k7, err


def _error_norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return np.sqrt(np.mean((err / scale) ** 2, axis=-1))


def _step_factor(en):
    """Step-size multiplier after a step with scaled error norm ``en``."""
    factor = np.where(
        en == 0.0, _MAX_FACTOR, np.minimum(_MAX_FACTOR, _SAFETY * np.maximum(en, 1e-300) ** -0.2)
    )
    return np.maximum(_MIN_FACTOR, factor)


def _initial_step(rhs, t0, y0, rtol, atol, max_step, span):
    """Hairer's starting-step heuristic, vectorized over seeds."""
    f0 = rhs(t0, y0)
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2, axis=-1))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2, axis=-1))
    h0 = np.where((d0 < 1e-5) | (d1 < 1e-5), 1e-6, 0.01 * d0 / np.maximum(d1, 1e-300))
    h0 = np.minimum(h0, np.maximum(span, 1e-300))
    y1 = y0 + h0[:, None] * f0
    f1 = rhs(t0 + h0, y1)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2, axis=-1)) / h0
    dm = np.maximum(d1, d2)
    h1 = np.where(
        dm <= 1e-15,
        np.maximum(1e-6, h0 * 1e-3),
        (0.01 / np.maximum(dm, 1e-300)) ** 0.2,
    )
    return np.minimum(np.minimum(100 * h0, h1), np.minimum(max_step, np.maximum(span, 1e-300)))


def hermite_eval(theta, h, y0, f0, y1, f1):
    """Cubic Hermite interpolant on one accepted step, at fraction ``theta``."""
    th = np.asarray(theta)
    t2 = th * th
    t3 = t2 * th
    a = 2 * t3 - 3 * t2 + 1
    b = (t3 - 2 * t2 + th) * h
    c = -2 * t3 + 3 * t2
    d = (t3 - t2) * h

    def col(v):
        v = np.asarray(v)
        return v[..., None] if v.ndim == 1 and np.ndim(y0) == 2 else v

    return col(a) * y0 + col(b) * f0 + col(c) * y1 + col(d) * f1


@dataclass
class DenseSteps:
    """Per-step data for dense evaluation on a recorded trajectory."""

    t0: np.ndarray  # (m,)
    h: np.ndarray   # (m,)
    y0: np.ndarray  # (m, d)
    f0: np.ndarray  # (m, d)
    y1: np.ndarray  # (m, d)
    f1: np.ndarray  # (m, d)

    def eval(self, i, theta):
        return hermite_eval(theta, self.h[i], self.y0[i], self.f0[i], self.y1[i], self.f1[i])


def solve_dense(rhs, t0, t_end, y0, rtol, atol, max_step, breaks=()):
    """Integrate one trajectory, recording accepted steps and dense data.

    ``breaks`` lists interior times where a step endpoint is forced (the
    integrator restarts there), keeping piecewise-defined fields clean.
    Returns ``(ts, ys, DenseSteps)``.
    """
    y = np.atleast_2d(np.asarray(y0, dtype=float)).copy()
    if not np.all(np.isfinite(y)):
        raise NonFiniteState("initial state is not finite")
    targets = [b for b in sorted(breaks) if t0 < b < t_end] + [t_end]

    ts = [t0]
    ys = [y[0].copy()]
    rec_t0, rec_h, rec_y0, rec_f0, rec_y1, rec_f1 = [], [], [], [], [], []

    t = t0
    for target in targets:
        h = float(
            _initial_step(
                rhs, np.array([t]), y, rtol, atol, max_step, np.array([target - t])
            )[0]
        )
        while t < target:
            h_min = 10 * _EPS * max(abs(t), 1.0)
            if target - t <= h_min:
                t = target
                break
            h = min(h, max_step, target - t)
            if h < h_min:
                raise StepSizeUnderflow(f"step size {h:.3e} underflowed at t={t:.6g}")
            y_new, k1, k7, err = _stages(rhs, np.array([t]), y, np.array([h]))
            if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(err))):
                raise NonFiniteState(f"vector field produced non-finite values near t={t:.6g}")
            en = float(_error_norm(err, y, y_new, rtol, atol)[0])
            if en <= 1.0:
                rec_t0.append(t)
                rec_h.append(h)
                rec_y0.append(y[0].copy())
                rec_f0.append(k1[0].copy())
                rec_y1.append(y_new[0].copy())
                rec_f1.append(k7[0].copy())
                t = t + h
                y = y_new
                ts.append(t)
                ys.append(y[0].copy())
                h = h * float(_step_factor(np.array([en]))[0])
            else:
                h = h * max(_MIN_FACTOR, _SAFETY * en ** -0.2)

    dense = DenseSteps(
        t0=np.asarray(rec_t0),
        h=np.asarray(rec_h),
        y0=np.asarray(rec_y0),
        f0=np.asarray(rec_f0),
        y1=np.asarray(rec_y1),
        f1=np.asarray(rec_f1),
    )
    return np.asarray(ts), np.asarray(ys), dense


def solve_to(rhs, y0, t0, t_end, rtol, atol, max_step, breaks=()):
    """Advance a batch of seeds to ``t_end`` (no recording, no events).

    Returns ``(y_final, ok)`` where ``ok`` flags seeds that integrated
    cleanly; failed seeds hold NaN.
    """
    y = np.array(y0, dtype=float, copy=True)
    n = y.shape[0]
    targets = [b for b in sorted(breaks) if t0 < b < t_end] + [t_end]
    ok = np.ones(n, dtype=bool)

    t = np.full(n, float(t0))
    h = np.zeros(n)
    for target in targets:
        idx = np.flatnonzero(ok & (t < target))
        if idx.size == 0:
            continue
        h[idx] = _initial_step(rhs, t[idx], y[idx], rtol, atol, max_step, target - t[idx])
        live = np.zeros(n, dtype=bool)
        live[idx] = True
        while np.any(live):
            idx = np.flatnonzero(live)
            h_min = 10 * _EPS * np.maximum(np.abs(t[idx]), 1.0)
            snap = (target - t[idx]) <= h_min
            if np.any(snap):
                done = idx[snap]
                t[done] = target
                live[done] = False
                idx = idx[~snap]
                if idx.size == 0:
                    break
                h_min = h_min[~snap]
            hs = np.minimum(np.minimum(h[idx], max_step), target - t[idx])
            dead = hs < h_min
            if np.any(dead):
                bad = idx[dead]
                ok[bad] = False
                y[bad] = np.nan
                live[bad] = False
                idx = idx[~dead]
                if idx.size == 0:
                    continue
                hs = hs[~dead]
            y_new, _, _, err = _stages(rhs, t[idx], y[idx], hs)
            finite = np.all(np.isfinite(y_new), axis=-1) & np.all(np.isfinite(err), axis=-1)
            en = np.where(finite, _error_norm(err, y[idx], y_new, rtol, atol), np.inf)
            bad = idx[~finite]
            if bad.size:
                ok[bad] = False
                y[bad] = np.nan
                live[bad] = False
            good = finite & (en <= 1.0)
            acc = idx[good]
            if acc.size:
                t[acc] = t[acc] + hs[good]
                y[acc] = y_new[good]
                h[acc] = hs[good] * _step_factor(en[good])
                live[acc[t[acc] >= target]] = False
            rej = finite & (en > 1.0)
            if np.any(rej):
                h[idx[rej]] = hs[rej] * np.maximum(_MIN_FACTOR, _SAFETY * en[rej] ** -0.2)
    return y, ok


# Per-seed status codes for the event sweep.
RUNNING = 0
DONE = 1       # collected all requested events
NO_RETURN = 2  # span exhausted without a direction-matching crossing
FAILED = 3     # step underflow or non-finite field values


def solve_events(rhs, y0, span, gfun, direction, t_min, n_events, rtol, atol, max_step,
                 g_tol=1e-10):
    """Detect ``n_events`` section crossings per seed, restarting at each.

    ``gfun(y) -> g`` is the (vectorized) section residual; a crossing is a
    strict sign change of ``g`` between accepted steps, refined by bisection
    on the cubic Hermite interpolant until the bracket collapses (residual
    well below ``g_tol`` for transversal crossings).  ``direction`` is +1
    (ascending), -1 (descending) or 0 (both).  Crossings at flight time
    ``<= t_min`` since the last restart are ignored, so a seed lying on the
    section does not immediately re-trigger.

    Returns ``(events_y, events_t, counts, status)`` with ``events_y`` of
    shape ``(n_events, n, d)`` (NaN where missing) and ``events_t`` the
    flight times since the previous restart.
    """
    y = np.array(y0, dtype=float, copy=True)
    n, d = y.shape
    events_y = np.full((n_events, n, d), np.nan)
    events_t = np.full((n_events, n), np.nan)
    counts = np.zeros(n, dtype=int)
    status = np.full(n, RUNNING, dtype=int)

    t = np.zeros(n)  # flight time since the seed's last restart
    h = _initial_step(rhs, t, y, rtol, atol, max_step, np.full(n, span))
    prev_sign = np.zeros(n, dtype=int)  # 0 until g is resolvably nonzero

    while np.any(status == RUNNING):
        idx = np.flatnonzero(status == RUNNING)
        h_min = 10 * _EPS * np.maximum(np.abs(t[idx]), 1.0)
        spent = (span - t[idx]) <= h_min
        if np.any(spent):
            status[idx[spent]] = NO_RETURN
            idx = idx[~spent]
            if idx.size == 0:
                continue
            h_min = h_min[~spent]
        hs = np.minimum(np.minimum(h[idx], max_step), span - t[idx])
        dead = hs < h_min
        if np.any(dead):
            status[idx[dead]] = FAILED
            idx = idx[~dead]
            if idx.size == 0:
                continue
            hs = hs[~dead]
        y_new, k1, k7, err = _stages(rhs, t[idx], y[idx], hs)
        finite = np.all(np.isfinite(y_new), axis=-1) & np.all(np.isfinite(err), axis=-1)
        if not np.all(finite):
            status[idx[~finite]] = FAILED
        en = np.where(finite, _error_norm(err, y[idx], y_new, rtol, atol), np.inf)
        rej = finite & (en > 1.0)
        if np.any(rej):
            h[idx[rej]] = hs[rej] * np.maximum(_MIN_FACTOR, _SAFETY * en[rej] ** -0.2)
        good = finite & (en <= 1.0)
        acc = idx[good]
        if acc.size == 0:
            continue

        ha = hs[good]
        ya0, ya1 = y[acc], y_new[good]
        fa0, fa1 = k1[good], k7[good]
        ena = en[good]
        g1 = np.asarray(gfun(ya1))
        s1 = np.sign(g1).astype(int)
        crossing = (prev_sign[acc] != 0) & (s1 != 0) & (s1 != prev_sign[acc])

        consumed = np.zeros(acc.size, dtype=bool)
        if np.any(crossing):
            ci = np.flatnonzero(crossing)
            lo = np.zeros(ci.size)
            hi = np.ones(ci.size)
            sc = s1[ci]
            for _ in range(_BISECT_ITERS):
                mid = 0.5 * (lo + hi)
                ym = hermite_eval(mid, ha[ci], ya0[ci], fa0[ci], ya1[ci], fa1[ci])
                gm = np.asarray(gfun(ym))
                upper = np.sign(gm).astype(int) == sc
                hi = np.where(upper, mid, hi)
                lo = np.where(upper, lo, mid)
            theta = hi  # endpoint on the arrival side: residual side-consistent
            yc = hermite_eval(theta, ha[ci], ya0[ci], fa0[ci], ya1[ci], fa1[ci])
            tc = t[acc[ci]] + theta * ha[ci]

            want = tc > t_min
            if direction != 0:
                want &= sc == direction
            hit = ci[want]
            if hit.size:
                rows = acc[hit]
                yhit = yc[want]
                thit = tc[want]
                for j, row in enumerate(rows):
                    events_y[counts[row], row] = yhit[j]
                    events_t[counts[row], row] = thit[j]
                counts[rows] += 1
                status[rows[counts[rows] >= n_events]] = DONE
                restart = rows[counts[rows] < n_events]
                if restart.size:
                    pos = {row: j for j, row in enumerate(rows)}
                    sel = np.array([pos[r] for r in restart])
                    y[restart] = yhit[sel]
                    t[restart] = 0.0
                    h[restart] = _initial_step(
                        rhs,
                        np.zeros(restart.size),
                        y[restart],
                        rtol,
                        atol,
                        max_step,
                        np.full(restart.size, span),
                    )
                    prev_sign[restart] = 0
                consumed = np.isin(acc, rows)

        # Ordinary advance for accepted seeds that did not consume an event.
        adv = acc[~consumed]
        if adv.size:
            sel = ~consumed
            t[adv] = t[adv] + ha[sel]
            y[adv] = ya1[sel]
            h[adv] = ha[sel] * _step_factor(ena[sel])
            news = s1[sel]
            prev_sign[adv] = np.where(news != 0, news, prev_sign[adv])
            status[adv[t[adv] >= span]] = NO_RETURN

    return events_y, events_t, counts, status
