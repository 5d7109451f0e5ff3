"""Clifford generators and the Clifford membership test.

A Clifford unitary maps Weyl operators to Weyl operators up to phase
under conjugation.  Its phase-space footprint is an affine map on labels,
v -> linear @ v + shift (column vectors (p1, q1, p2, q2, ...) mod d), with
the linear part symplectic.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from .modring import ModInt, inv2, omega_exponent_of
from .qmat import dagger, hs_inner, is_unitary
from .weyl import WeylLabel, weyl_matrix

OVERLAP_SNAP = 1e-6


class NotCliffordError(ValueError):
    """Conjugation of some Weyl generator did not land on a single Weyl
    operator, or the assembled label map is not symplectic."""

    def __init__(self, message, generator=None):
        super().__init__(message)
        self.generator = generator


@dataclass(frozen=True)
class PhaseSpaceAction:
    """Affine action on phase-space labels: v -> linear @ v + shift (mod d)."""

    linear: np.ndarray  # (2n, 2n) int, mod d
    shift: np.ndarray   # (2n,) int, mod d
    d: int

    def __post_init__(self):
        lin = np.asarray(self.linear, dtype=np.int64) % self.d
        sh = np.asarray(self.shift, dtype=np.int64) % self.d
        lin.flags.writeable = False
        sh.flags.writeable = False
        object.__setattr__(self, "linear", lin)
        object.__setattr__(self, "shift", sh)

    @property
    def n(self) -> int:
        return self.linear.shape[0] // 2

    def apply(self, label: WeylLabel) -> WeylLabel:
        vec = (self.linear @ label.as_vector() + self.shift) % self.d
        return WeylLabel.from_vector(vec, self.d)

    def compose(self, first: "PhaseSpaceAction") -> "PhaseSpaceAction":
        """Action of (self after first)."""
        if self.d != first.d:
            raise ValueError("dimension mismatch")
        return PhaseSpaceAction(
            linear=self.linear @ first.linear,
            shift=self.linear @ first.shift + self.shift,
            d=self.d,
        )

    def __eq__(self, other) -> bool:
        return (isinstance(other, PhaseSpaceAction) and self.d == other.d
                and np.array_equal(self.linear, other.linear)
                and np.array_equal(self.shift, other.shift))


def symplectic_form_matrix(n: int) -> np.ndarray:
    """Block-diagonal [[0, 1], [-1, 0]] per qudit, so that [a,b] = a^T J b."""
    j = np.zeros((2 * n, 2 * n), dtype=np.int64)
    for k in range(n):
        j[2 * k, 2 * k + 1] = 1
        j[2 * k + 1, 2 * k] = -1
    return j


def is_symplectic(mat: np.ndarray, d: int) -> bool:
    n = mat.shape[0] // 2
    j = symplectic_form_matrix(n)
    return np.array_equal((mat.T @ j @ mat) % d, j % d)


def hadamard(d: int) -> np.ndarray:
    """Generalized Hadamard H|x> = (1/sqrt d) sum_k omega^(xk) |k>."""
    x = np.arange(d)
    return np.exp(2j * np.pi * np.outer(x, x) / d) / np.sqrt(d)


def phase_gate(d: int) -> np.ndarray:
    """Diagonal Clifford P|x> = omega^(inv2(d) x(x-1)) |x>, odd d only."""
    t = inv2(d).value  # raises for even d
    x = np.arange(d)
    return np.diag(np.exp(2j * np.pi * (t * x * (x - 1) % d) / d))


def _conjugated_weyl_label(u: np.ndarray, gen: WeylLabel):
    """Match u W_gen u^dagger to phase * W_label by maximal overlap.

    Returns (label, phase) where phase is the exact complex overlap divided
    by the total dimension.  The overlap modulus must be d^n within snap
    tolerance, else the map spread over several labels and u is rejected.
    """
    d, n = gen.d, gen.n
    dim = d**n
    c = u @ weyl_matrix(gen) @ dagger(u)
    best, best_abs, best_label = None, -1.0, None
    from .weyl import all_labels

    for lab in all_labels(d, n):
        ov = hs_inner(weyl_matrix(lab), c)
        if abs(ov) > best_abs:
            best, best_abs, best_label = ov, abs(ov), lab
    if abs(best_abs - dim) > OVERLAP_SNAP * dim:
        raise NotCliffordError(
            f"conjugation of generator {gen.pairs} has Weyl overlap profile "
            f"spread over multiple labels (max |overlap|/dim = {best_abs / dim:.6f})",
            generator=gen,
        )
    return best_label, best / dim


def _generator_labels(d: int, n: int):
    gens = []
    for j in range(2 * n):
        vec = [0] * (2 * n)
        vec[j] = 1
        gens.append(WeylLabel.from_vector(vec, d))
    return gens


def is_clifford(u: np.ndarray, d: int, n: int = 1) -> PhaseSpaceAction:
    """Test Clifford membership and extract the phase-space action.

    Conjugates each of the 2n Weyl generators, assembles the linear label
    map column by column, and checks it is symplectic mod d.  The shift is
    recovered from the conjugation phases: for odd d phases are normalized
    against the translation-covariant (Wigner) phase convention, which
    makes the shift exactly the image of the phase-space origin.  For even
    d no such convention exists and the shift is normalized against the
    plain Z^p X^q convention (exact for Hadamard and Weyl gates; any
    half-integer residue of the conjugation phase is dropped).

    Raises NotCliffordError carrying the first failing generator.
    """
    u = np.asarray(u, dtype=complex)
    dim = d**n
    if u.shape != (dim, dim):
        raise ValueError(f"expected a {dim} x {dim} matrix, got {u.shape}")
    if not is_unitary(u):
        raise NotCliffordError("matrix is not unitary")

    m2 = 2 * d
    gens = _generator_labels(d, n)
    columns = []
    chis = []  # conjugation phase exponents, Z_2d convention
    half = inv2(d).value if d % 2 == 1 else None
    for gen in gens:
        lab, phase = _conjugated_weyl_label(u, gen)
        columns.append(lab.as_vector())
        k = omega_exponent_of(phase, d, OVERLAP_SNAP)
        if half is not None:
            # normalize against the phased Weyl convention omega^(-inv2 pq) W:
            # generators carry no correction (pq = 0), images do
            k = (k + 2 * half * sum(p * q for p, q in lab.pairs)) % m2
        chis.append(k)

    linear = np.stack(columns, axis=1) % d
    if not is_symplectic(linear, d):
        raise NotCliffordError("assembled label map is not symplectic mod d")

    # chi(e) = [s, e] with s = linear^-1 shift, so s is read off the
    # generator phases pairwise: s_p = chi(e_q), s_q = -chi(e_p).
    s_doubled = np.zeros(2 * n, dtype=np.int64)
    for j in range(n):
        s_doubled[2 * j] = chis[2 * j + 1]
        s_doubled[2 * j + 1] = -chis[2 * j]
    if half is not None:
        if np.any(s_doubled % 2):
            raise NotCliffordError("conjugation phases are not integer omega powers")
        shift = (linear @ (s_doubled // 2)) % d
    else:
        shift = (linear @ (s_doubled % m2 // 2)) % d
    return PhaseSpaceAction(linear=linear, shift=shift, d=d)


def clifford_group_elements(d: int, n: int = 1) -> list[PhaseSpaceAction]:
    """All |SL(2, Z_d)| * d^2 single-qudit actions, prime d only."""
    if n != 1:
        raise ValueError("enumeration is single-qudit only")
    if d < 2 or any(d % k == 0 for k in range(2, d)):
        raise ValueError(f"d = {d} is not prime")
    actions = []
    for a, b, c, e in product(range(d), repeat=4):
        if (a * e - b * c) % d != 1:
            continue
        lin = np.array([[a, b], [c, e]], dtype=np.int64)
        for sp, sq in product(range(d), repeat=2):
            actions.append(PhaseSpaceAction(linear=lin, shift=np.array([sp, sq]), d=d))
    return actions
