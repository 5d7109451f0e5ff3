"""Outcome-assignment constraint system for translation-covariant frames.

The deterministic outcome exponents v_{p,q} assigned by the phase-space
origin to each Weyl measurement must satisfy three families of linear
congruences (Hermiticity of the origin operator, covariance under the
Hadamard, and additivity over commuting pairs).  In the doubled variables
u = 2v over Z_2d the system is linear with integer coefficients for every
d.  Solving it yields the whole story: a unique solution u = 2 * inv2 * pq
for odd d (which rebuilds the discrete Wigner frame), and an explicit
small contradiction for every even d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from . import _kernels
from .modring import inv2
from .qmat import is_close
from .weyl import WeylLabel, all_labels, weyl_matrix, weyl_superop_apply

TAG_HERMITICITY = "hermiticity"
TAG_HADAMARD = "hadamard_covariance"
TAG_SUM = "commuting_sum"
TAG_NORMALIZATION = "normalization"
TAG_DERIVED = "derived"


@dataclass(frozen=True)
class Constraint:
    """A congruence sum_i coeffs[i] * u[indices[i]] = rhs (mod 2d).

    indices are flat p*d+q unknown labels, merged and sorted; a constraint
    whose coefficients all cancel keeps an empty index tuple.
    """

    indices: tuple
    coeffs: tuple
    rhs: int
    tag: str
    source: tuple

    @classmethod
    def make(cls, entries, rhs, tag, source, m):
        acc = {}
        for i, c in entries:
            acc[i] = (acc.get(i, 0) + c) % m
        items = sorted((i, c) for i, c in acc.items() if c != 0)
        return cls(indices=tuple(i for i, _ in items),
                   coeffs=tuple(c for _, c in items),
                   rhs=rhs % m, tag=tag, source=tuple(source))

    def evaluate(self, u, m) -> bool:
        acc = -self.rhs
        for i, c in zip(self.indices, self.coeffs):
            acc += c * u[i]
        return acc % m == 0

    def describe(self, d: int) -> str:
        if not self.indices:
            lhs = "0"
        else:
            parts = []
            for i, c in zip(self.indices, self.coeffs):
                p, q = divmod(i, d)
                parts.append(f"{c}*u({p},{q})")
            lhs = " + ".join(parts)
        return f"{lhs} = {self.rhs} (mod {2 * d})  [{self.tag} {self.source}]"


@dataclass(frozen=True)
class VConstraintSystem:
    d: int
    constraints: tuple

    @property
    def modulus(self) -> int:
        return 2 * self.d

    @property
    def n_unknowns(self) -> int:
        return self.d * self.d

    def as_padded_arrays(self):
        """(idx, coef, rhs) padded to width 3 for the enumeration kernel,
        ordered by arity so early exits trigger fast."""
        cons = sorted(self.constraints, key=lambda c: (len(c.indices), c.indices))
        k = len(cons)
        idx = np.full((k, 3), -1, dtype=np.int64)
        coef = np.zeros((k, 3), dtype=np.int64)
        rhs = np.zeros(k, dtype=np.int64)
        for r, c in enumerate(cons):
            for t, (i, co) in enumerate(zip(c.indices, c.coeffs)):
                idx[r, t] = i
                coef[r, t] = co
            rhs[r] = c.rhs
        return idx, coef, rhs

    def row_matrix(self) -> np.ndarray:
        """Dense (k, n_unknowns + 1) matrix mod 2d, rhs in the last column."""
        rows = np.zeros((len(self.constraints), self.n_unknowns + 1), dtype=np.int64)
        for r, c in enumerate(self.constraints):
            for i, co in zip(c.indices, c.coeffs):
                rows[r, i] = co
            rows[r, -1] = c.rhs
        return rows


def _flat(p: int, q: int, d: int) -> int:
    return (p % d) * d + (q % d)


def build_constraints(d: int) -> VConstraintSystem:
    """Generate the full system over Z_2d in the doubled variables u = 2v.

    Families (all labels reduced mod d, all congruences mod 2d):
      hermiticity        u(p,q) + u(-p,-q) = 2pq          for all (p,q)
      hadamard_covariance u(p,q) - u(-q,p)  = 2pq          for all (p,q)
      commuting_sum      u(p+p',q+q') - u(p,q) - u(p',q') = 2p'q
                         for every ordered pair with pq' = qp' (mod d)
      normalization      u(0,0) = 0
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    m = 2 * d
    cons = []
    for p in range(d):
        for q in range(d):
            cons.append(Constraint.make(
                [(_flat(p, q, d), 1), (_flat(-p, -q, d), 1)], 2 * p * q,
                TAG_HERMITICITY, ((p, q),), m))
            cons.append(Constraint.make(
                [(_flat(p, q, d), 1), (_flat(-q, p, d), -1)], 2 * p * q,
                TAG_HADAMARD, ((p, q),), m))
    pts = [(p, q) for p in range(d) for q in range(d)]
    for (p, q) in pts:
        for (pp, qq) in pts:
            if (p * qq - q * pp) % d != 0:
                continue
            cons.append(Constraint.make(
                [(_flat(p + pp, q + qq, d), 1), (_flat(p, q, d), -1),
                 (_flat(pp, qq, d), -1)], 2 * pp * q,
                TAG_SUM, ((p, q), (pp, qq)), m))
    cons.append(Constraint.make([(_flat(0, 0, d), 1)], 0,
                                TAG_NORMALIZATION, (), m))
    return VConstraintSystem(d=d, constraints=tuple(cons))


# ---------------------------------------------------------------------------
# verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Unique:
    """Single solution; u over Z_2d, flat p*d+q order."""

    u: np.ndarray
    d: int

    @property
    def v(self) -> np.ndarray:
        """Outcome exponents v = u / 2 as integers mod d; the solved u is
        even whenever the verdict is Unique (asserted, not assumed)."""
        if np.any(self.u % 2):
            raise AssertionError("unique solution has odd entries; v is not integral")
        return (self.u // 2) % self.d

    def v_grid(self) -> np.ndarray:
        return self.v.reshape(self.d, self.d)


@dataclass(frozen=True)
class WitnessRow:
    constraint: Constraint
    derived_from: tuple = ()  # indices into the generating constraint list


@dataclass(frozen=True)
class InfeasibilityWitness:
    rows: tuple
    d: int

    def unknowns(self) -> tuple:
        seen = []
        for row in self.rows:
            for i in row.constraint.indices:
                if i not in seen:
                    seen.append(i)
        return tuple(seen)

    def recheck_exhaustively(self) -> bool:
        """True iff no assignment of the involved unknowns satisfies every
        witness row; brute force over (2d)^k candidates."""
        m = 2 * self.d
        unknowns = self.unknowns()
        pos = {u: j for j, u in enumerate(unknowns)}
        for assign in product(range(m), repeat=len(unknowns)):
            ok = True
            for row in self.rows:
                acc = -row.constraint.rhs
                for i, c in zip(row.constraint.indices, row.constraint.coeffs):
                    acc += c * assign[pos[i]]
                if acc % m != 0:
                    ok = False
                    break
            if ok:
                return False
        return True

    def describe(self) -> str:
        lines = []
        for row in self.rows:
            txt = row.constraint.describe(self.d)
            if row.derived_from:
                txt += f"  (derived from constraints {list(row.derived_from)})"
            lines.append(txt)
        return "\n".join(lines)


@dataclass(frozen=True)
class Infeasible:
    witness: InfeasibilityWitness
    d: int


@dataclass(frozen=True)
class Multiple:
    solution_count: int
    d: int


# ---------------------------------------------------------------------------
# Hermite-style elimination over Z_2d with the modulus folded in
# ---------------------------------------------------------------------------

def _egcd(a: int, b: int):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qt = old_r // r
        old_r, r = r, old_r - qt * r
        old_s, s = s, old_s - qt * s
        old_t, t = t, old_t - qt * t
    return old_r, old_s, old_t


def _unit_lift(x: int, m: int) -> tuple[int, int]:
    """A unit c mod m with c * x = gcd(x, m) (mod m).

    Every element of Z_m is a unit multiple of its gcd with m; the unit is
    found by inverting x/g mod m/g and lifting the inverse to a residue
    coprime to m.
    """
    g = math.gcd(x % m, m)
    xp, mp = (x % m) // g, m // g
    c = pow(xp, -1, mp) if mp > 1 else 1
    while math.gcd(c, m) != 1:
        c += mp
    return c, g


class HowellForm:
    """Row echelon form of an integer row space mod m, saturated with the
    annihilator rows m*e_j so that solution counting and membership tests
    are exact over Z_m."""

    def __init__(self, rows: np.ndarray, m: int, n_cols: int):
        self.m = m
        self.n_cols = n_cols
        self.pivots: dict[int, tuple[int, np.ndarray]] = {}
        self.inconsistent_row: np.ndarray | None = None
        self.rhs_ideal = m
        self._reduce(np.array(rows, dtype=np.int64) % m)

    def _reduce(self, work: np.ndarray):
        m = self.m
        # duplicate congruences are frequent (both orders of a commuting
        # pair give the same row); drop them before eliminating
        work = np.unique(work, axis=0)
        # room for one stabilization row per column
        pad = np.zeros((self.n_cols + 1, work.shape[1]), dtype=np.int64)
        work = np.vstack([work, pad])
        n_used = work.shape[0] - pad.shape[0]
        active = np.zeros(work.shape[0], dtype=bool)
        active[:n_used] = True

        for col in range(self.n_cols):
            live = np.flatnonzero(active & (work[:, col] % m != 0))
            if live.size == 0:
                continue
            entries = work[live, col] % m
            units = [(r, e) for r, e in zip(live, entries) if math.gcd(int(e), m) == 1]
            if units:
                # fast path: normalize a unit-entry row, subtract it from
                # the rest in one vectorized sweep
                r0, e0 = units[0]
                work[r0] = (work[r0] * pow(int(e0), -1, m)) % m
                others = live[live != r0]
                if others.size:
                    mult = work[others, col] % m
                    work[others] = (work[others] - mult[:, None] * work[r0][None, :]) % m
                self.pivots[col] = (1, work[r0].copy())
                active[r0] = False
                continue
            # fold all live rows into one by unimodular 2x2 gcd steps
            r0 = int(live[0])
            for r1 in live[1:]:
                x, y = int(work[r0, col] % m), int(work[r1, col] % m)
                g, a, b = _egcd(x, y)
                new0 = (a * work[r0] + b * work[r1]) % m
                new1 = ((x // g) * work[r1] - (y // g) * work[r0]) % m
                work[r0], work[r1] = new0, new1
            # stabilize: a unit multiple turns the entry into gcd(entry, m);
            # the residual (m/g) * pivot carries the implied tail constraints
            x = int(work[r0, col] % m)
            c, g = _unit_lift(x, m)
            pivot = (c * work[r0]) % m
            residual = ((m // g) * pivot) % m
            work[r0] = residual
            if not residual.any():
                active[r0] = False
            slot = n_used
            n_used += 1
            work[slot] = pivot
            self.pivots[col] = (g % m, pivot.copy())
            active[slot] = False

        # consistency scan over remaining active rows; pure-rhs rows
        # generate an ideal (rhs_ideal) used by the membership test
        self.rhs_ideal = m
        for r in np.flatnonzero(active):
            if np.all(work[r, :-1] % m == 0) and work[r, -1] % m != 0:
                if self.inconsistent_row is None:
                    self.inconsistent_row = work[r].copy()
                self.rhs_ideal = math.gcd(self.rhs_ideal, int(work[r, -1] % m))

    @property
    def consistent(self) -> bool:
        return self.inconsistent_row is None

    def solution_count(self) -> int:
        if not self.consistent:
            return 0
        count = 1
        for col in range(self.n_cols):
            count *= int(self.pivots[col][0]) if col in self.pivots else self.m
        return count

    def back_substitute(self) -> np.ndarray:
        """The solution of a uniquely solvable system (all pivots unit)."""
        if self.solution_count() != 1:
            raise ValueError("system is not uniquely solvable")
        m = self.m
        u = np.zeros(self.n_cols, dtype=np.int64)
        for col in range(self.n_cols - 1, -1, -1):
            _, row = self.pivots[col]
            acc = int(row[-1])
            acc -= int(np.dot(row[col + 1:-1], u[col + 1:]))
            u[col] = acc % m
        return u

    def reduce_row(self, row: np.ndarray) -> np.ndarray:
        """Reduce a row against the pivots; a zero result (including rhs)
        means the row lies in the generated row space mod m."""
        m = self.m
        r = np.array(row, dtype=np.int64) % m
        for col in range(self.n_cols):
            e = int(r[col] % m)
            if e == 0 or col not in self.pivots:
                continue
            g, pivot = self.pivots[col]
            if e % g:
                break  # not reducible at this pivot
            r = (r - (e // g) * pivot) % m
        return r

    def contains(self, row: np.ndarray) -> bool:
        red = self.reduce_row(row) % self.m
        if np.any(red[:-1]):
            return False
        return int(red[-1]) % self.rhs_ideal == 0


def howell_form(system: VConstraintSystem) -> HowellForm:
    return HowellForm(system.row_matrix(), system.modulus, system.n_unknowns)


def row_space_contains(system: VConstraintSystem, constraint: Constraint,
                       form: HowellForm | None = None) -> bool:
    form = form or howell_form(system)
    row = np.zeros(system.n_unknowns + 1, dtype=np.int64)
    for i, c in zip(constraint.indices, constraint.coeffs):
        row[i] = c
    row[-1] = constraint.rhs
    return form.contains(row)


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

def _single_row_witness(system: VConstraintSystem) -> InfeasibilityWitness | None:
    m = system.modulus
    for c in system.constraints:
        if not c.indices:
            if c.rhs % m != 0:
                return InfeasibilityWitness(rows=(WitnessRow(c),), d=system.d)
        elif len(c.indices) == 1:
            g = math.gcd(c.coeffs[0], m)
            if c.rhs % g != 0:
                return InfeasibilityWitness(rows=(WitnessRow(c),), d=system.d)
    return None


def _constraint_index(system: VConstraintSystem, tag: str, source: tuple) -> int:
    for i, c in enumerate(system.constraints):
        if c.tag == tag and c.source == source:
            return i
    raise KeyError((tag, source))


def _doubling_row(system: VConstraintSystem, p: int, q: int):
    """Derived congruence u(2p,2q) = 4pq and the generating rows behind it:
    the self-commuting sum rule at (p,q) plus the Hermiticity and two
    Hadamard rows whose combination gives 2 u(p,q) = 2pq."""
    d = system.d
    m = system.modulus
    row = Constraint.make([(_flat(2 * p, 2 * q, d), 1)], 4 * p * q,
                          TAG_DERIVED, ((2 * p % d, 2 * q % d),), m)
    sigma = (-q % d, p % d)
    prov = (
        _constraint_index(system, TAG_SUM, ((p, q), (p, q))),
        _constraint_index(system, TAG_HERMITICITY, ((p, q),)),
        _constraint_index(system, TAG_HADAMARD, ((p, q),)),
        _constraint_index(system, TAG_HADAMARD, (sigma,)),
    )
    return row, prov


def _mod4_witness(system: VConstraintSystem) -> InfeasibilityWitness:
    """Three-row contradiction for d = 4r: the commuting-pair rule at
    (0,2), (2r, 2r-2) forces 4r = 0 (mod 8r) once the doubled-label values
    are substituted."""
    d = system.d
    m = system.modulus
    r = d // 4
    sum_idx = _constraint_index(system, TAG_SUM, ((0, 2), (2 * r % d, (2 * r - 2) % d)))
    row_a = WitnessRow(system.constraints[sum_idx])
    row_b_con, prov_b = _doubling_row(system, r, r)
    row_b = WitnessRow(row_b_con, derived_from=prov_b)
    c1, prov_c1 = _doubling_row(system, 0, 1)
    c2, prov_c2 = _doubling_row(system, r, r - 1)
    combined = Constraint.make(
        list(zip(c1.indices, c1.coeffs)) + list(zip(c2.indices, c2.coeffs)),
        c1.rhs + c2.rhs, TAG_DERIVED,
        ((0, 2 % d), (2 * r % d, (2 * r - 2) % d)), m)
    row_c = WitnessRow(combined, derived_from=tuple(dict.fromkeys(prov_c1 + prov_c2)))
    return InfeasibilityWitness(rows=(row_a, row_b, row_c), d=d)


def find_witness(system: VConstraintSystem,
                 form: HowellForm | None = None) -> InfeasibilityWitness:
    """A witness of at most three congruences over at most three unknowns.

    For d = 2 (mod 4) a single generating Hadamard row at (d/2, d/2) is
    already contradictory.  For d = 0 (mod 4) no small subset of generating
    rows is infeasible, so the witness mixes one generating sum rule with
    two derived rows, each carrying its generating provenance; derived rows
    are checked to lie in the generated row space.
    """
    single = _single_row_witness(system)
    if single is not None:
        return single
    if system.d % 4 != 0:
        raise ValueError("no analytic witness for this system")
    witness = _mod4_witness(system)
    form = form or howell_form(system)
    for row in witness.rows:
        if row.derived_from and not row_space_contains(system, row.constraint, form):
            raise AssertionError("derived witness row escaped the row space")
    return witness


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def solve(system: VConstraintSystem):
    """Verdict for the assignment system: Unique, Infeasible, or Multiple.

    Elimination runs over Z_2d by gcd pivoting with the modulus folded in;
    infeasible systems additionally get a human-scale witness whose
    exhaustive recheck is independent of the elimination.
    """
    form = howell_form(system)
    if not form.consistent:
        witness = find_witness(system, form)
        if not witness.recheck_exhaustively():
            raise AssertionError("extracted witness admits an assignment")
        return Infeasible(witness=witness, d=system.d)
    count = form.solution_count()
    if count == 1:
        return Unique(u=form.back_substitute(), d=system.d)
    return Multiple(solution_count=count, d=system.d)


def brute_force_verdict(system: VConstraintSystem, max_keep: int = 4):
    """Exhaustive enumeration over all (2d)^(d^2) assignments.

    Independent of the elimination path; practical for d <= 3.  Returns
    (count, solutions) where each solution is a flat u-vector.
    """
    idx, coef, rhs = system.as_padded_arrays()
    return _kernels.brute_force_count(system.modulus, system.n_unknowns,
                                      idx, coef, rhs, max_keep)


# ---------------------------------------------------------------------------
# downstream checks for odd d
# ---------------------------------------------------------------------------

def expected_unique_v(d: int) -> np.ndarray:
    """inv2(d) * p * q mod d on the flat grid, odd d."""
    half = inv2(d).value
    p, q = np.divmod(np.arange(d * d), d)
    return (half * p * q) % d


def origin_operator_from_assignment(v: np.ndarray, d: int) -> np.ndarray:
    """F(0,0) = (1/d) sum omega^v(p,q) W(p,q)^dagger."""
    omega = np.exp(2j * np.pi / d)
    acc = np.zeros((d, d), dtype=complex)
    for flat, lab in enumerate(all_labels(d, 1)):
        acc += omega ** int(v[flat]) * weyl_matrix(lab).conj().T
    return acc / d


def verify_against_wigner(d: int, tol: float = 1e-9) -> bool:
    """Check the unique odd-d assignment rebuilds the discrete Wigner frame.

    The solved v goes into the origin expansion F(0,0); translating by
    every Weyl superoperator must then reproduce each phase-point operator.
    """
    from .wigner import phase_point

    if d % 2 == 0:
        raise ValueError("odd d only")
    verdict = solve(build_constraints(d))
    if not isinstance(verdict, Unique):
        raise ValueError(f"expected a unique solution at d={d}, got {type(verdict).__name__}")
    f00 = origin_operator_from_assignment(verdict.v, d)
    if not is_close(f00, phase_point(WeylLabel.single(0, 0, d)), tol):
        return False
    for lab in all_labels(d, 1):
        translated = weyl_superop_apply(lab, f00)
        if not is_close(translated, phase_point(lab), tol):
            return False
    return True


def ontic_labelling_check(d: int, tol: float = 1e-9) -> bool:
    """Check the phase-space labelling semantics of the Wigner frame:
    eigenstates of X sit uniformly on rows of constant p, eigenstates of Z
    on columns of constant q, the X and Z superoperators shift q and p by
    one, and the Hadamard permutation fixes the origin."""
    from .frames import rep_channel, rep_state
    from .clifford import hadamard
    from .weyl import label_to_flat, weyl_measurement
    from .wigner import gross_frame

    if d % 2 == 0:
        raise ValueError("odd d only")
    frame, dual = gross_frame(d, 1)

    x_label = WeylLabel.single(0, 1, d)
    z_label = WeylLabel.single(1, 0, d)
    # X eigenstate with eigenvalue omega^(-p1) lives on the line {(p1, q)}
    for k, proj in weyl_measurement(x_label).terms:
        p1 = (-(k // 2)) % d
        values = rep_state(proj, dual)
        line = [label_to_flat(WeylLabel.single(p1, q, d)) for q in range(d)]
        expect = np.zeros(d * d)
        expect[line] = 1.0 / d
        if np.max(np.abs(values - expect)) > tol:
            return False
    # Z eigenstate with eigenvalue omega^(q1) lives on the line {(p, q1)}
    for k, proj in weyl_measurement(z_label).terms:
        q1 = (k // 2) % d
        values = rep_state(proj, dual)
        line = [label_to_flat(WeylLabel.single(p, q1, d)) for p in range(d)]
        expect = np.zeros(d * d)
        expect[line] = 1.0 / d
        if np.max(np.abs(values - expect)) > tol:
            return False
    # superoperator permutations: X shifts q, Z shifts p, H fixes the origin
    for lab, off in ((x_label, (0, 1)), (z_label, (1, 0))):
        xi = rep_channel(weyl_matrix(lab), frame, dual)
        for lam in range(d * d):
            src = frame.phase_point(lam)
            dst = label_to_flat(src + WeylLabel.single(*off, d))
            if abs(xi[dst, lam] - 1) > tol:
                return False
    xi_h = rep_channel(hadamard(d), frame, dual)
    return bool(abs(xi_h[0, 0] - 1) <= tol)
