"""Weyl (generalized Pauli) operators W_{p,q} = Z^p X^q and their algebra.

Conventions: X|x> = |x+1>, Z|x> = omega^x |x>, omega = exp(2*pi*i/d), and
the operator phase convention is fixed so that W_{p,q} is literally the
product Z^p X^q with no extra phase.  Multi-qudit labels are ordered lists
of (p, q) pairs over a single common dimension d; the first pair is the
slow tensor index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .modring import ModInt
from .qmat import SpectralDecomposition, spectral_decompose, tensor_all


@dataclass(frozen=True)
class WeylLabel:
    """Phase-space label: one (p, q) pair per qudit, reduced mod d."""

    pairs: tuple
    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be positive")
        if not self.pairs:
            raise ValueError("label needs at least one (p, q) pair")
        reduced = tuple((int(p) % self.d, int(q) % self.d) for p, q in self.pairs)
        object.__setattr__(self, "pairs", reduced)

    @classmethod
    def single(cls, p: int, q: int, d: int) -> "WeylLabel":
        return cls(pairs=((p, q),), d=d)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def is_identity(self) -> bool:
        return all(p == 0 and q == 0 for p, q in self.pairs)

    def __add__(self, other: "WeylLabel") -> "WeylLabel":
        self._check(other)
        return WeylLabel(tuple((p + pp, q + qq) for (p, q), (pp, qq)
                               in zip(self.pairs, other.pairs)), self.d)

    def __neg__(self) -> "WeylLabel":
        return WeylLabel(tuple((-p, -q) for p, q in self.pairs), self.d)

    def _check(self, other: "WeylLabel"):
        if self.d != other.d or self.n != other.n:
            raise ValueError("labels live on different systems")

    def as_vector(self) -> np.ndarray:
        """Flattened (p1, q1, p2, q2, ...) integer vector."""
        return np.array([c for pair in self.pairs for c in pair], dtype=np.int64)

    @classmethod
    def from_vector(cls, vec, d: int) -> "WeylLabel":
        vec = list(vec)
        pairs = tuple((vec[2 * i], vec[2 * i + 1]) for i in range(len(vec) // 2))
        return cls(pairs=pairs, d=d)


def symplectic_product(a: WeylLabel, b: WeylLabel) -> int:
    """[a, b] = sum_j (p_a q_b - q_a p_b) mod d."""
    a._check(b)
    total = sum(pa * qb - qa * pb for (pa, qa), (pb, qb) in zip(a.pairs, b.pairs))
    return total % a.d


@lru_cache(maxsize=None)
def _single_qudit_weyl(p: int, q: int, d: int) -> np.ndarray:
    x = np.zeros((d, d), dtype=complex)
    for j in range(d):
        x[(j + q) % d, j] = 1.0
    omega = np.exp(2j * np.pi / d)
    z_phases = omega ** (p * np.arange(d) % d)
    w = z_phases[:, None] * x
    w.flags.writeable = False
    return w


def weyl_matrix(label: WeylLabel, d: int | None = None) -> np.ndarray:
    """Matrix of Z^p X^q, tensored over the qudits of a multi-qudit label."""
    if d is not None and d != label.d:
        raise ValueError(f"label has d={label.d}, got d={d}")
    return tensor_all(_single_qudit_weyl(p, q, label.d) for p, q in label.pairs)


def compose_labels(a: WeylLabel, b: WeylLabel) -> tuple[WeylLabel, ModInt]:
    """Label and phase of the product W_a W_b = omega^(-p_b q_a) W_(a+b).

    The phase exponent is returned in the Z_2d convention (even values are
    integer powers of omega), summed over qudits.
    """
    a._check(b)
    d = a.d
    phase = sum(-pb * qa for (_, qa), (pb, _) in zip(a.pairs, b.pairs))
    return a + b, ModInt(2 * phase, 2 * d)


def weyl_superop_apply(label: WeylLabel, rho: np.ndarray) -> np.ndarray:
    """W rho W^dagger.  In labels these superoperators compose additively."""
    w = weyl_matrix(label)
    if rho.shape != w.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {w.shape}")
    return w @ rho @ w.conj().T

def weyl_measurement(label: WeylLabel, d: int | None = None) -> SpectralDecomposition:
    """Projective measurement in the eigenbasis of W_label.

    Weyl operators are normal, with eigenvalues among the 2d-th roots of
    unity; outcomes are indexed by the eigenvalue exponent in Z_2d.
    """
    return spectral_decompose(weyl_matrix(label, d), label.d)


def all_labels(d: int, n: int = 1):
    """All d^(2n) labels in flat phase-point order."""
    return [flat_to_label(flat, d, n) for flat in range(d ** (2 * n))]


def label_to_flat(label: WeylLabel) -> int:
    """Flat phase-point index; (p1, q1) are the most significant digits."""
    flat = 0
    for p, q in label.pairs:
        flat = (flat * label.d + p) * label.d + q
    return flat


def flat_to_label(flat: int, d: int, n: int) -> WeylLabel:
    vec = []
    for k in range(2 * n - 1, -1, -1):
        vec.append((flat // d**k) % d)
    return WeylLabel.from_vector(vec, d)
