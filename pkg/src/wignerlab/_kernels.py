"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

The numba path is used when numba imports and the environment variable
WIGNERLAB_NO_NUMBA is unset (or "0"); setting it to anything else forces
the numpy path.  Both paths are exact integer / identical-comparison
code, so their outputs agree bit for bit.
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "WIGNERLAB_NO_NUMBA"

try:
    from numba import njit

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag instead
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap(args[0]) if args and callable(args[0]) else wrap


def numba_enabled() -> bool:
    if os.environ.get(ENV_FLAG, "").strip() not in ("", "0"):
        return False
    return HAS_NUMBA


# ---------------------------------------------------------------------------
# assignment enumeration: count solutions of a sparse congruence system
# ---------------------------------------------------------------------------

def _brute_force_loop(m, n_unknowns, idx, coef, rhs, max_keep, sols):
    digits = np.zeros(n_unknowns, dtype=np.int64)
    total = 1
    for _ in range(n_unknowns):
        total *= m
    count = 0
    n_rows = idx.shape[0]
    for _ in range(total):
        ok = True
        for r in range(n_rows):
            acc = -rhs[r]
            for t in range(3):
                j = idx[r, t]
                if j >= 0:
                    acc += coef[r, t] * digits[j]
            if acc % m != 0:
                ok = False
                break
        if ok:
            if count < max_keep:
                sols[count, :] = digits
            count += 1
        # odometer increment
        for j in range(n_unknowns):
            digits[j] += 1
            if digits[j] < m:
                break
            digits[j] = 0
    return count


_brute_force_numba = njit(cache=True, nogil=True)(_brute_force_loop)


def _brute_force_numpy(m, n_unknowns, idx, coef, rhs, max_keep, sols):
    chunk = 1 << 19
    total = m**n_unknowns
    count = 0
    for start in range(0, total, chunk):
        stop = min(start + chunk, total)
        cand = np.arange(start, stop, dtype=np.int64)
        # odometer order: unknown j is digit j, least significant first
        digits = np.empty((stop - start, n_unknowns), dtype=np.int64)
        rem = cand
        for j in range(n_unknowns):
            digits[:, j] = rem % m
            rem = rem // m
        alive = digits
        for r in range(idx.shape[0]):
            acc = np.full(alive.shape[0], -rhs[r], dtype=np.int64)
            for t in range(3):
                if idx[r, t] >= 0:
                    acc += coef[r, t] * alive[:, idx[r, t]]
            alive = alive[acc % m == 0]
            if alive.shape[0] == 0:
                break
        for row in alive:
            if count < max_keep:
                sols[count, :] = row
            count += 1
    return count


def brute_force_count(m: int, n_unknowns: int, idx: np.ndarray, coef: np.ndarray,
                      rhs: np.ndarray, max_keep: int = 4):
    """Enumerate all m^n assignments against the padded sparse rows.

    Returns (count, solutions) where solutions holds the first max_keep
    satisfying assignments in odometer order (unknown 0 varies fastest).
    """
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    coef = np.ascontiguousarray(coef, dtype=np.int64)
    rhs = np.ascontiguousarray(rhs, dtype=np.int64)
    sols = np.zeros((max_keep, n_unknowns), dtype=np.int64)
    fn = _brute_force_numba if numba_enabled() else _brute_force_numpy
    count = fn(m, n_unknowns, idx, coef, rhs, max_keep, sols)
    return int(count), sols[: min(count, max_keep)]


# ---------------------------------------------------------------------------
# phase-point trajectory sampler
# ---------------------------------------------------------------------------

OP_PERM = 0
OP_STOCH = 1
OP_MEASURE = 2


def _sample_loop(initial_cdf, op_kind, perms, cdfs, responses, draw_col,
                 uniforms, outcomes):
    shots = uniforms.shape[0]
    n_ops = op_kind.shape[0]
    n_states = initial_cdf.shape[0]
    for s in range(shots):
        u = uniforms[s, 0]
        lam = 0
        while lam < n_states - 1 and u >= initial_cdf[lam]:
            lam += 1
        rec = 0
        for o in range(n_ops):
            kind = op_kind[o]
            if kind == OP_PERM:
                lam = perms[o, lam]
            else:
                if kind == OP_MEASURE:
                    outcomes[s, rec] = responses[o, lam]
                    rec += 1
                u = uniforms[s, draw_col[o]]
                nxt = 0
                while nxt < n_states - 1 and u >= cdfs[o, nxt, lam]:
                    nxt += 1
                lam = nxt
    return outcomes


_sample_numba = njit(cache=True, nogil=True)(_sample_loop)


def _sample_numpy(initial_cdf, op_kind, perms, cdfs, responses, draw_col,
                  uniforms, outcomes):
    shots = uniforms.shape[0]
    n_states = initial_cdf.shape[0]
    lam = np.minimum(np.searchsorted(initial_cdf, uniforms[:, 0], side="right"),
                     n_states - 1)
    rec = 0
    for o in range(op_kind.shape[0]):
        kind = op_kind[o]
        if kind == OP_PERM:
            lam = perms[o, lam]
            continue
        if kind == OP_MEASURE:
            outcomes[:, rec] = responses[o, lam]
            rec += 1
        u = uniforms[:, draw_col[o]]
        nxt = np.empty(shots, dtype=np.int64)
        for val in np.unique(lam):
            sel = lam == val
            nxt[sel] = np.searchsorted(cdfs[o, :, val], u[sel], side="right")
        lam = np.minimum(nxt, n_states - 1)
    return outcomes


def sample_trajectories(initial_cdf, op_kind, perms, cdfs, responses, draw_col,
                        uniforms, n_measurements: int):
    """Push shots through the compiled program, recording measurement
    responses.  Identical output on both backends for equal uniforms."""
    shots = uniforms.shape[0]
    outcomes = np.zeros((shots, n_measurements), dtype=np.int64)
    fn = _sample_numba if numba_enabled() else _sample_numpy
    fn(np.ascontiguousarray(initial_cdf, dtype=np.float64),
       np.ascontiguousarray(op_kind, dtype=np.int8),
       np.ascontiguousarray(perms, dtype=np.int64),
       np.ascontiguousarray(cdfs, dtype=np.float64),
       np.ascontiguousarray(responses, dtype=np.int64),
       np.ascontiguousarray(draw_col, dtype=np.int64),
       np.ascontiguousarray(uniforms, dtype=np.float64),
       outcomes)
    return outcomes
