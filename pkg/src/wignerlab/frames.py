"""Minimal-frame quasiprobability representations.

A frame is a basis {F_lam} of unit-trace Hermitian operators indexed by
phase points; its unique dual {D_lam} satisfies tr(D_mu F_lam) =
delta_(lam,mu) and sum_lam D_lam = 1.  States map to real vectors
tr(D_lam rho), effects to tr(F_lam E), channels to quasistochastic
matrices tr(D_mu E(F_lam)) with unit column sums, and Born probabilities
are recovered by contraction.

Hermitian-space linear algebra runs in Weyl coordinates: coords(A)_b =
tr(W_b^dagger A) / d^n, which turns the dual-basis condition into a plain
linear solve thanks to Weyl orthonormality.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qmat import MATRIX_TOL, dagger, is_close, max_norm
from .weyl import all_labels, flat_to_label, weyl_matrix

NONNEG_TOL = 1e-9


@lru_cache(maxsize=None)
def _weyl_stack(d: int, n: int) -> np.ndarray:
    """All d^(2n) Weyl matrices stacked in flat label order."""
    stack = np.stack([weyl_matrix(lab) for lab in all_labels(d, n)])
    stack.flags.writeable = False
    return stack


@lru_cache(maxsize=None)
def _pairing(d: int, n: int) -> np.ndarray:
    """K with tr(A B) = coords(A)^T K coords(B):
    K[a, b] = d^n * delta_(b, -a) * omega^(sum p_a q_a)."""
    labels = all_labels(d, n)
    dim = d**n
    size = d ** (2 * n)
    k = np.zeros((size, size), dtype=complex)
    from .weyl import label_to_flat

    omega = np.exp(2j * np.pi / d)
    for flat, lab in enumerate(labels):
        neg = label_to_flat(-lab)
        k[flat, neg] = dim * omega ** (sum(p * q for p, q in lab.pairs) % d)
    k.flags.writeable = False
    return k


def weyl_coords(a: np.ndarray, d: int, n: int) -> np.ndarray:
    """Complex coordinates of a in the Weyl basis: tr(W_b^dagger a) / d^n."""
    stack = _weyl_stack(d, n)
    return np.einsum("bij,ij->b", stack.conj(), np.asarray(a)) / d**n


def from_weyl_coords(c: np.ndarray, d: int, n: int) -> np.ndarray:
    return np.tensordot(np.asarray(c), _weyl_stack(d, n), axes=(0, 0))


def _check_frame_elements(elements: np.ndarray, what: str):
    traces = np.einsum("aii->a", elements)
    if np.max(np.abs(traces - 1)) > MATRIX_TOL:
        raise ValueError(f"{what} elements must have unit trace")
    herm = max_norm(elements - np.transpose(elements.conj(), (0, 2, 1)))
    if herm > MATRIX_TOL:
        raise ValueError(f"{what} elements must be Hermitian")


@dataclass(frozen=True)
class Frame:
    """Indexed basis {F_lam} of unit-trace Hermitian operators.

    elements has shape (d^(2n), d^n, d^n) in flat phase-point order.
    """

    elements: np.ndarray
    d: int
    n: int

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=complex)
        if el.shape != (self.d ** (2 * self.n),) + (self.d**self.n,) * 2:
            raise ValueError(f"bad element stack shape {el.shape}")
        _check_frame_elements(el, "frame")
        coords = np.stack([weyl_coords(f, self.d, self.n) for f in el])
        if np.linalg.matrix_rank(coords, tol=1e-9) < el.shape[0]:
            raise ValueError("not a basis: frame elements are linearly dependent")
        el.flags.writeable = False
        object.__setattr__(self, "elements", el)

    def phase_point(self, flat: int):
        return flat_to_label(flat, self.d, self.n)


@dataclass(frozen=True)
class DualFrame:
    """The unique {D_lam} with tr(D_mu F_lam) = delta and sum D_lam = 1."""

    elements: np.ndarray
    d: int
    n: int

    def __post_init__(self):
        el = np.asarray(self.elements, dtype=complex)
        _check_dual(el, self.d, self.n)
        el.flags.writeable = False
        object.__setattr__(self, "elements", el)


def _check_dual(el: np.ndarray, d: int, n: int):
    total = el.sum(axis=0)
    if not is_close(total, np.eye(d**n)):
        raise ValueError("dual elements must sum to the identity")
    herm = max_norm(el - np.transpose(el.conj(), (0, 2, 1)))
    if herm > MATRIX_TOL:
        raise ValueError("dual elements must be Hermitian")


def dual_basis(frame: Frame) -> DualFrame:
    """Solve tr(D_mu F_lam) = delta_(lam,mu) in Weyl coordinates.

    The solution exists and is unique because the frame is a basis of the
    Hermitian operators; a rank-deficient family raises instead.
    """
    d, n = frame.d, frame.n
    cf = np.stack([weyl_coords(f, d, n) for f in frame.elements], axis=1)
    k = _pairing(d, n)
    m = k @ cf  # tr(D F_lam) = coords(D)^T (K cf)[:, lam]
    try:
        cd = np.linalg.inv(m.T)
    except np.linalg.LinAlgError as exc:
        raise ValueError("not a basis: dual solve is singular") from exc
    duals = np.stack([from_weyl_coords(cd[:, mu], d, n) for mu in range(cd.shape[1])])
    # drop numerical dust off the Hermitian parts
    duals = (duals + np.transpose(duals.conj(), (0, 2, 1))) / 2
    return DualFrame(elements=duals, d=d, n=n)


@dataclass(frozen=True)
class Channel:
    """Completely positive map, held as Kraus operators or as a
    superoperator matrix in Weyl coordinates."""

    kraus: tuple | None = None
    weyl_superop: np.ndarray | None = None
    d: int | None = None
    n: int | None = None

    @classmethod
    def from_unitary(cls, u: np.ndarray) -> "Channel":
        return cls(kraus=(np.asarray(u, dtype=complex),))

    @classmethod
    def from_kraus(cls, ops) -> "Channel":
        return cls(kraus=tuple(np.asarray(k, dtype=complex) for k in ops))

    @classmethod
    def from_weyl_superop(cls, s: np.ndarray, d: int, n: int) -> "Channel":
        return cls(weyl_superop=np.asarray(s, dtype=complex), d=d, n=n)

    def apply(self, rho: np.ndarray) -> np.ndarray:
        if self.kraus is not None:
            out = np.zeros_like(np.asarray(rho, dtype=complex))
            for k in self.kraus:
                out += k @ rho @ dagger(k)
            return out
        c = weyl_coords(rho, self.d, self.n)
        return from_weyl_coords(self.weyl_superop @ c, self.d, self.n)

    def is_trace_preserving(self, dim: int, tol: float = 1e-8) -> bool:
        if self.kraus is not None:
            acc = sum(dagger(k) @ k for k in self.kraus)
            return is_close(acc, np.eye(dim), tol)
        # tr(A) is d^n times the identity-label Weyl coordinate, so traces
        # survive iff the superop fixes that coordinate
        row = np.zeros(self.weyl_superop.shape[0])
        row[0] = 1.0
        return max_norm(self.weyl_superop[0] - row) <= tol


def _as_channel(channel) -> Channel:
    if isinstance(channel, Channel):
        return channel
    if isinstance(channel, np.ndarray):
        return Channel.from_unitary(channel)
    raise TypeError(f"cannot interpret {type(channel)} as a channel")


def rep_state(rho: np.ndarray, dual: DualFrame) -> np.ndarray:
    """xi_rho(lam) = tr(D_lam rho); sums to 1 for unit-trace rho."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != dual.elements.shape[1:]:
        raise ValueError(f"dimension mismatch: {rho.shape}")
    return np.real(np.einsum("aij,ji->a", dual.elements, rho))


def rep_effect(effect: np.ndarray, frame: Frame) -> np.ndarray:
    """xi_E(lam) = tr(F_lam E)."""
    effect = np.asarray(effect, dtype=complex)
    if effect.shape != frame.elements.shape[1:]:
        raise ValueError(f"dimension mismatch: {effect.shape}")
    return np.real(np.einsum("aij,ji->a", frame.elements, effect))


def rep_channel(channel, frame: Frame, dual: DualFrame) -> np.ndarray:
    """xi(mu|lam) = tr(D_mu E(F_lam)), a matrix with unit column sums.

    Composition of channels becomes matrix product of representations.
    """
    chan = _as_channel(channel)
    dim = frame.d**frame.n
    if not chan.is_trace_preserving(dim):
        raise ValueError("channel is not trace-preserving")
    mapped = np.stack([chan.apply(f) for f in frame.elements])
    return np.real(np.einsum("bij,aji->ba", dual.elements, mapped))


def recover_probability(xi_effect: np.ndarray, xi_channel: np.ndarray,
                        xi_state: np.ndarray) -> float:
    """Born probability tr(E EE(rho)) = sum xi_E(mu) xi(mu|lam) xi_rho(lam)."""
    return float(np.asarray(xi_effect) @ np.asarray(xi_channel) @ np.asarray(xi_state))


def is_nonnegative(rep: np.ndarray, tol: float = NONNEG_TOL):
    """Check all entries lie in [-tol, 1 + tol].

    Returns (ok, extremal_entry, flat_index); the extremal entry is the
    violating one if any, else the minimum.
    """
    arr = np.asarray(rep)
    idx_min = np.unravel_index(np.argmin(arr), arr.shape)
    idx_max = np.unravel_index(np.argmax(arr), arr.shape)
    vmin = float(arr[idx_min])
    vmax = float(arr[idx_max])
    if vmin < -tol:
        return False, vmin, idx_min
    if vmax > 1 + tol:
        return False, vmax, idx_max
    return True, vmin, idx_min
