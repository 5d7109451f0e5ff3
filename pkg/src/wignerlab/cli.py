"""Command-line surface: uniqueness, wigner, simulate, sweep.

Exit codes are a stable contract: 0 success / expected verdict, 1 usage
or input error, 2 unexpected verdict, 3 negativity.  Reports serialize as
single JSON documents with schema_version and deterministic field order;
floats print with 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

SCHEMA_VERSION = 1
DIM_MIN, DIM_MAX = 2, 32
THREADS_ENV = "WIGNERLAB_THREADS"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNEXPECTED = 2
EXIT_NEGATIVITY = 3


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


def round_sig(x: float) -> float:
    return float(f"{float(x):.12g}")


def _label_json(label) -> list:
    return [list(pair) for pair in label.pairs]


def _write_report(report: dict, path: str | None):
    if path:
        with open(path, "w") as fh:
            json.dump(report, fh, indent=2)
            fh.write("\n")


def _report(command: str, parameters: dict, body: dict, checks: list,
            started: float) -> dict:
    report = {"schema_version": SCHEMA_VERSION, "command": command,
              "parameters": parameters}
    report.update(body)
    report["checks"] = checks
    report["wall_time_s"] = round_sig(time.perf_counter() - started)
    return report


# ---------------------------------------------------------------------------
# state and circuit files
# ---------------------------------------------------------------------------

def _dense_from_json(obj: dict) -> np.ndarray:
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
    if re.shape != im.shape or re.ndim != 2 or re.shape[0] != re.shape[1]:
        raise UsageError("dense state needs square matching re/im matrices")
    return re + 1j * im


def load_state(obj: dict, d: int, n: int) -> np.ndarray:
    """Density matrix from a state spec: stabilizer, product, or dense."""
    from .stabilizer import state_from_basis

    kind = obj.get("kind")
    if kind == "stabilizer":
        if n != 1:
            raise UsageError("a single stabilizer spec describes one qudit; "
                             "use kind=product or kind=dense for n > 1")
        st = state_from_basis(obj["basis"], int(obj["eigenvalue_exponent"]), d)
        return st.projector()
    if kind == "product":
        factors = obj["factors"]
        if len(factors) != n:
            raise UsageError(f"product state has {len(factors)} factors, expected {n}")
        vec = np.ones(1, dtype=complex)
        for f in factors:
            st = state_from_basis(f["basis"], int(f["eigenvalue_exponent"]), d)
            vec = np.kron(vec, st.vector)
        return np.outer(vec, vec.conj())
    if kind == "dense":
        rho = _dense_from_json(obj)
        if rho.shape != (d**n, d**n):
            raise UsageError(f"dense state has shape {rho.shape}, expected {(d**n,)*2}")
        return rho
    raise UsageError(f"unknown state kind {kind!r}")


def circuit_from_json(obj: dict):
    from .sim import Circuit, Gate
    from .stabilizer import state_from_basis
    from .weyl import WeylLabel

    d = int(obj["dim"])
    n = int(obj.get("qudits", 1))
    init = obj["initial"]
    if isinstance(init, list):
        if len(init) != n:
            raise UsageError(f"initial has {len(init)} qudit specs, expected {n}")
        initial = [state_from_basis(s["basis"], int(s["eigenvalue_exponent"]), d)
                   for s in init]
    else:
        initial = load_state(init, d, n)
    gates = []
    for g in obj.get("gates", []):
        kind = g["kind"]
        if kind in ("hadamard", "phase"):
            gates.append(Gate(kind=kind, targets=tuple(g["targets"])))
        elif kind == "weyl":
            gates.append(Gate(kind="weyl",
                              label=WeylLabel(tuple(tuple(p) for p in g["label"]), d)))
        elif kind == "custom":
            gates.append(Gate(kind="custom", targets=tuple(g["targets"]),
                              matrix=_dense_from_json(g)))
        else:
            raise UsageError(f"unknown gate kind {kind!r}")
    measurements = tuple(WeylLabel(tuple(tuple(p) for p in lab), d)
                         for lab in obj.get("measurements", []))
    return Circuit(d=d, n=n, initial=initial, gates=tuple(gates),
                   measurements=measurements)


def circuit_to_json(circuit) -> dict:
    out = {"schema_version": SCHEMA_VERSION, "dim": circuit.d, "qudits": circuit.n}
    if isinstance(circuit.initial, np.ndarray):
        rho = np.asarray(circuit.initial)
        out["initial"] = {"kind": "dense", "re": rho.real.tolist(),
                          "im": rho.imag.tolist()}
    else:
        specs = []
        for st in circuit.initial:
            label, k = st.stabilizer_labels[0]
            p, q = label.pairs[0]
            basis = "Z" if (p, q) == (1, 0) else ("X" if (p, q) == (0, 1) else f"XZ^{p}")
            specs.append({"kind": "stabilizer", "basis": basis,
                          "eigenvalue_exponent": k // 2})
        out["initial"] = specs
    gates = []
    for g in circuit.gates:
        if g.kind in ("hadamard", "phase"):
            gates.append({"kind": g.kind, "targets": list(g.targets)})
        elif g.kind == "weyl":
            gates.append({"kind": "weyl", "label": _label_json(g.label)})
        else:
            gates.append({"kind": "custom", "targets": list(g.targets),
                          "re": g.matrix.real.tolist(), "im": g.matrix.imag.tolist()})
    out["gates"] = gates
    out["measurements"] = [_label_json(lab) for lab in circuit.measurements]
    return out


# ---------------------------------------------------------------------------
# uniqueness / sweep
# ---------------------------------------------------------------------------

def _uniqueness_body(d: int) -> tuple[dict, list, bool]:
    from .nogo import (Infeasible, Multiple, Unique, build_constraints,
                       ontic_labelling_check, solve, verify_against_wigner)

    verdict = solve(build_constraints(d))
    checks = []
    body: dict = {"dim": d}
    expected = False
    if isinstance(verdict, Unique):
        body["verdict"] = "unique"
        body["assignment_v"] = verdict.v_grid().tolist()
        matches = verify_against_wigner(d)
        labelling = ontic_labelling_check(d)
        checks.append({"name": "unique_solution", "passed": True})
        checks.append({"name": "matches_wigner_frame", "passed": bool(matches)})
        checks.append({"name": "ontic_labelling", "passed": bool(labelling)})
        expected = d % 2 == 1 and matches and labelling
    elif isinstance(verdict, Infeasible):
        body["verdict"] = "infeasible"
        w = verdict.witness
        body["witness"] = {
            "rows": [{"congruence": row.constraint.describe(d),
                      "tag": row.constraint.tag,
                      "derived_from": list(row.derived_from)}
                     for row in w.rows],
            "unknowns": [list(divmod(i, d)) for i in w.unknowns()],
        }
        recheck = w.recheck_exhaustively()
        checks.append({"name": "witness_recheck", "passed": bool(recheck)})
        expected = d % 2 == 0 and recheck
    else:
        body["verdict"] = "multiple"
        body["solution_count"] = verdict.solution_count
        checks.append({"name": "unique_or_infeasible", "passed": False})
    return body, checks, expected


def cmd_uniqueness(args) -> int:
    started = time.perf_counter()
    d = args.dim
    if not DIM_MIN <= d <= DIM_MAX:
        raise UsageError(f"--dim must be in [{DIM_MIN}, {DIM_MAX}]")
    body, checks, expected = _uniqueness_body(d)
    report = _report("uniqueness", {"dim": d}, body, checks, started)
    _write_report(report, args.json)
    if body["verdict"] == "unique":
        ok = "matches Wigner frame" if checks[1]["passed"] else "DOES NOT match Wigner frame"
        lab = "labelling OK" if checks[2]["passed"] else "labelling FAILED"
        print(f"d={d}: Unique; {ok}; {lab}")
    elif body["verdict"] == "infeasible":
        print(f"d={d}: Infeasible; witness:")
        for row in body["witness"]["rows"]:
            print("  " + row["congruence"])
    else:
        print(f"d={d}: Multiple ({body['solution_count']} solutions)")
    return EXIT_OK if expected else EXIT_UNEXPECTED


def _parse_dims(spec: str) -> list[int]:
    try:
        if ".." in spec:
            lo, hi = spec.split("..")
            lo, hi = int(lo), int(hi)
        else:
            lo = hi = int(spec)
    except ValueError as exc:
        raise UsageError(f"bad dimension range {spec!r}; use e.g. 2..9") from exc
    if lo > hi:
        raise UsageError("empty dimension range")
    if not (DIM_MIN <= lo and hi <= DIM_MAX):
        raise UsageError(f"range must lie within [{DIM_MIN}, {DIM_MAX}]")
    return list(range(lo, hi + 1))


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    dims = _parse_dims(args.dims)
    workers = int(os.environ.get(THREADS_ENV, "1") or "1")
    results = {}
    if workers > 1 and len(dims) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=min(workers, len(dims))) as pool:
            for d, res in zip(dims, pool.map(_uniqueness_body, dims)):
                results[d] = res
    else:
        for d in dims:
            results[d] = _uniqueness_body(d)

    words = []
    per_dim = []
    all_expected = True
    for d in dims:
        body, checks, expected = results[d]
        all_expected &= expected
        if body["verdict"] == "unique":
            word = "unique-gross" if expected else "unique-MISMATCH"
        else:
            word = body["verdict"]
        words.append(f"{d}:{word}")
        per_dim.append({"dim": d, "verdict": body["verdict"],
                        "expected": bool(expected), "checks": checks})
    line = " ".join(words)
    print(line)
    report = _report("sweep", {"dims": args.dims},
                     {"summary": line, "dimensions": per_dim},
                     [{"name": "all_expected", "passed": all_expected}], started)
    _write_report(report, args.json)
    return EXIT_OK if all_expected else EXIT_UNEXPECTED


# ---------------------------------------------------------------------------
# wigner / simulate
# ---------------------------------------------------------------------------

def cmd_wigner(args) -> int:
    started = time.perf_counter()
    d, n = args.dim, args.qudits
    if not DIM_MIN <= d <= DIM_MAX:
        raise UsageError(f"--dim must be in [{DIM_MIN}, {DIM_MAX}]")
    if d % 2 == 0:
        raise UsageError(f"the Wigner representation needs odd d, got {d}")
    try:
        with open(args.state_file) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read state file: {exc}") from exc
    rho = load_state(obj, d, n)
    from .wigner import classify_resource, negativity, wigner
    from .weyl import flat_to_label

    values = wigner(rho, d, n)
    neg = negativity(rho, d, n)
    verdict, witness, worst = classify_resource(rho, d, n, kind="state")

    print(f"Wigner function over {d}^{2*n} phase points (p, q rows):")
    if n == 1:
        for p in range(d):
            row = " ".join(fmt(values[p * d + q]) for q in range(d))
            print(f"  p={p}: {row}")
    else:
        for flat, v in enumerate(values):
            print(f"  {flat_to_label(flat, d, n).pairs}: {fmt(v)}")
    print(f"min entry: {fmt(values.min())}")
    print(f"sum negativity: {fmt(neg)}")
    print(f"classification: {verdict} (witness {witness.pairs} -> {fmt(worst)})")

    report = _report("wigner", {"dim": d, "qudits": n, "state_file": args.state_file},
                     {"wigner_values": [round_sig(v) for v in values],
                      "min_entry": round_sig(values.min()),
                      "negativity": round_sig(neg),
                      "classification": verdict,
                      "witness": _label_json(witness)},
                     [{"name": "classified", "passed": True}], started)
    _write_report(report, args.json)
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    if args.shots < 1:
        raise UsageError("--shots must be positive")
    try:
        with open(args.circuit_file) as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read circuit file: {exc}") from exc
    from .sim import (EXACT_DIM_CAP, NegativityError, compile_circuit,
                      exact_probabilities, sample)

    circuit = circuit_from_json(obj)
    if circuit.d % 2 == 0:
        raise UsageError(f"simulation needs odd d, got {circuit.d}")
    try:
        compiled = compile_circuit(circuit)
    except NegativityError as exc:
        print(f"negativity: {exc}")
        report = _report("simulate",
                         {"circuit_file": args.circuit_file, "shots": args.shots,
                          "seed": args.seed},
                         {"error": "negativity", "element": exc.element,
                          "witness": repr(exc.witness),
                          "value": round_sig(exc.value)},
                         [{"name": "compiled", "passed": False}], started)
        _write_report(report, args.json)
        return EXIT_NEGATIVITY

    counts = sample(compiled, args.shots, args.seed)
    body = {"shots": args.shots, "seed": args.seed,
            "counts": {" ".join(map(str, k)): v for k, v in sorted(counts.items())}}
    checks = [{"name": "compiled", "passed": True}]
    print(f"counts over {len(counts)} outcome tuples ({args.shots} shots):")
    for k, v in sorted(counts.items()):
        print(f"  {k}: {v}")

    if circuit.d**circuit.n <= EXACT_DIM_CAP:
        exact = exact_probabilities(circuit)
        max_dev = 0.0
        for key in set(exact) | set(counts):
            dev = abs(exact.get(key, 0.0) - counts.get(key, 0) / args.shots)
            max_dev = max(max_dev, dev)
        body["exact_probabilities"] = {" ".join(map(str, k)): round_sig(v)
                                       for k, v in sorted(exact.items())}
        body["max_abs_deviation"] = round_sig(max_dev)
        checks.append({"name": "matches_exact_within_0.012", "passed": max_dev <= 0.012})
        print(f"max |frequency - exact probability| = {fmt(max_dev)}")

    report = _report("simulate",
                     {"circuit_file": args.circuit_file, "shots": args.shots,
                      "seed": args.seed},
                     body, checks, started)
    _write_report(report, args.json)
    return EXIT_OK if all(c["passed"] for c in checks) else EXIT_UNEXPECTED


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wignerlab",
                     description="discrete phase-space analysis and simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_uni = sub.add_parser("uniqueness", help="solve the outcome-assignment system")
    p_uni.add_argument("--dim", type=int, required=True)
    p_uni.add_argument("--json", default=None, help="write the report to this path")
    p_uni.set_defaults(fn=cmd_uniqueness)

    p_wig = sub.add_parser("wigner", help="Wigner table and negativity of a state")
    p_wig.add_argument("state_file")
    p_wig.add_argument("--dim", type=int, required=True)
    p_wig.add_argument("--qudits", type=int, default=1)
    p_wig.add_argument("--json", default=None)
    p_wig.set_defaults(fn=cmd_wigner)

    p_sim = sub.add_parser("simulate", help="compile and sample a circuit")
    p_sim.add_argument("circuit_file")
    p_sim.add_argument("--shots", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--json", default=None)
    p_sim.set_defaults(fn=cmd_simulate)

    p_swp = sub.add_parser("sweep", help="verdicts over a dimension range")
    p_swp.add_argument("--dims", required=True, help="range a..b within [2, 32]")
    p_swp.add_argument("--json", default=None)
    p_swp.set_defaults(fn=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
