"""Discrete Wigner representation for odd d.

The phase-point operators are built from the phased Weyl family
omega^(-inv2(d) pq) W_{p,q} by a symplectic Fourier sum; they are
Hermitian, unit trace, mutually orthogonal with tr(A_a A_b) = d delta,
translation covariant (conjugating by W_b shifts the label by b), and
essentially self-dual, so the frame is F_a = A_a with dual D_a = A_a / d.
Multi-qudit operators are tensor products of single-qudit ones.

None of this exists in even d: inv2 raises, which is the entry point of
the even-dimension no-go analysis in the nogo module.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .frames import DualFrame, Frame, rep_channel, rep_state
from .modring import inv2
from .qmat import MATRIX_TOL, is_close, is_hermitian, is_unitary, tensor_all
from .weyl import (WeylLabel, all_labels, flat_to_label, label_to_flat,
                   weyl_matrix)

NEG_TOL = 1e-9


def _require_odd(d: int):
    if d % 2 == 0:
        raise ValueError(
            f"Wigner representation undefined in even dimension d={d}; "
            "no nonnegative translation-covariant frame exists there"
        )


@lru_cache(maxsize=None)
def _phase_point_table(d: int) -> np.ndarray:
    """Single-qudit phase-point operators stacked in flat (p*d + q) order."""
    _require_odd(d)
    half = inv2(d).value
    omega = np.exp(2j * np.pi / d)
    table = np.zeros((d * d, d, d), dtype=complex)
    mats = [weyl_matrix(lab) for lab in all_labels(d, 1)]
    for aflat, a in enumerate(all_labels(d, 1)):
        (pa, qa) = a.pairs[0]
        acc = np.zeros((d, d), dtype=complex)
        for bflat, b in enumerate(all_labels(d, 1)):
            (pb, qb) = b.pairs[0]
            sym = (pa * qb - qa * pb) % d
            acc += omega ** ((sym - half * pb * qb) % d) * mats[bflat]
        table[aflat] = acc / d
    table.flags.writeable = False
    return table


def phase_point(a: WeylLabel, d: int | None = None) -> np.ndarray:
    """Phase-point operator A_a; tensor product across qudits."""
    if d is not None and d != a.d:
        raise ValueError(f"label has d={a.d}, got d={d}")
    table = _phase_point_table(a.d)
    return tensor_all(table[p * a.d + q] for p, q in a.pairs)


@lru_cache(maxsize=None)
def _frame_pair(d: int, n: int):
    _require_odd(d)
    single = _phase_point_table(d)
    stack = single
    for _ in range(n - 1):
        stack = np.stack([np.kron(x, y) for x in stack for y in single])
    frame = Frame(elements=stack, d=d, n=n)
    dual = DualFrame(elements=stack / d**n, d=d, n=n)
    return frame, dual


def gross_frame(d: int, n: int = 1) -> tuple[Frame, DualFrame]:
    """The self-dual Wigner frame: F_a = A_a, D_a = A_a / d^n.

    Dual invariants (unit partition and biorthogonality) are checked at
    construction by the Frame/DualFrame types.
    """
    return _frame_pair(d, n)


def wigner(rho: np.ndarray, d: int, n: int = 1) -> np.ndarray:
    """Wigner values tr(A_a rho) / d^n over flat phase points."""
    _, dual = gross_frame(d, n)
    return rep_state(rho, dual)


def negativity(rho: np.ndarray, d: int, n: int = 1) -> float:
    """Sum-negativity: total magnitude of negative Wigner values."""
    values = wigner(rho, d, n)
    return float(np.sum(np.maximum(0.0, -values)))


def classify_resource(x: np.ndarray, d: int, n: int = 1, kind: str = "auto"):
    """Classify a state or unitary as positively or negatively represented.

    Returns (verdict, witness_phase_point, witness_value) where verdict is
    "positive" or "negative"; the witness is the most negative entry's
    index (a label for states, a (row, column) label pair for unitaries),
    or the minimum entry if nonnegative.
    """
    _require_odd(d)
    x = np.asarray(x, dtype=complex)
    if kind == "auto":
        if is_unitary(x):
            kind = "unitary"
        elif is_hermitian(x, 1e-8) and abs(np.trace(x) - 1) < 1e-8:
            kind = "state"
        else:
            raise ValueError("input is neither unitary nor a unit-trace Hermitian state")
    if kind == "state":
        values = wigner(x, d, n)
        flat = int(np.argmin(values))
        witness = flat_to_label(flat, d, n)
        value = float(values[flat])
    elif kind == "unitary":
        frame, dual = gross_frame(d, n)
        xi = rep_channel(x, frame, dual)
        row, col = np.unravel_index(np.argmin(xi), xi.shape)
        witness = (flat_to_label(int(row), d, n), flat_to_label(int(col), d, n))
        value = float(xi[row, col])
    else:
        raise ValueError(f"unknown kind {kind!r}")
    verdict = "negative" if value < -NEG_TOL else "positive"
    return verdict, witness, value
