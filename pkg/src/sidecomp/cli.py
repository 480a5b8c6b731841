"""Batch command-line front door.

Subcommands: decompose, invariant, similar, rkhs, selftest. Reports are
deterministic: identical (input, seed, tolerances) produce byte-identical
JSON. Exit codes: 0 success, 2 input error, 3 numerical degeneracy,
4 property violation.
"""
from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import io as sio
from .decomposition import unit_si_decomposition
from .invariant import k0_descriptor, similar as similar_op, v_semigroup_invariant
from .oracle import oracle_is_strongly_irreducible
from .decomposition import is_strongly_irreducible
from .planted import planted_corpus, si_oracle_corpus
from .policy import DEFAULT_SEED, NumericPolicy, NumericalDegeneracyError
from .rkhs import (
    check_model_hypotheses,
    check_sphere_conditions,
    defect_operator,
    joint_eigenvector,
    p_sequence,
    spherical_shift,
    truncated_tuple,
)
from .tuples import validate_commuting

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DEGENERATE = 3
EXIT_VIOLATION = 4


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sidecomp",
        description="Decompositions, similarity invariants and multishift "
                    "models for commuting matrix tuples.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, input2=False, witness=False, output=False, count=False):
        if not count:
            sp.add_argument("--input", required=True, help="input JSON file")
        if input2:
            sp.add_argument("--input2", required=True, help="second tuple JSON file")
        sp.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                        help="64-bit seed (default: SIDECOMP_SEED or built-in)")
        sp.add_argument("--tol", type=float, default=None,
                        help="override commute/idem/kernel/inv tolerances")
        sp.add_argument("--format", choices=("json", "table"), default="json")
        if witness:
            sp.add_argument("--witness", action="store_true",
                            help="assemble and report an explicit conjugator")
        if output:
            sp.add_argument("--output", default=None,
                            help="write the truncated tuple to this file")
        if count:
            sp.add_argument("--count", type=int, default=100,
                            help="number of planted instances")
        return sp

    common(sub.add_parser("decompose", help="unit SI decomposition of a tuple"))
    common(sub.add_parser("invariant", help="similarity invariant and K0 data"))
    common(sub.add_parser("similar", help="decide similarity of two tuples"),
           input2=True, witness=True)
    common(sub.add_parser("rkhs", help="build a truncated multishift model"),
           output=True)
    common(sub.add_parser("selftest", help="planted recovery + oracle agreement"),
           count=True)
    return p


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("SIDECOMP_SEED")
    if env:
        return int(env, 0)
    return DEFAULT_SEED


def _resolve_policy(args, seed: int) -> NumericPolicy:
    pol = NumericPolicy(seed=seed)
    if args.tol is not None:
        pol = pol.with_(commute_tol=args.tol, idem_tol=args.tol,
                        kernel_tol=args.tol, inv_tol=args.tol)
    return pol


def _header(args, seed: int, pol: NumericPolicy) -> dict:
    return {"command": args.command, "seed": seed, "tolerances": pol.tolerances()}


def _emit(report: dict, fmt: str) -> None:
    if fmt == "json":
        sys.stdout.write(sio.canonical_json(report))
        return
    def lines(obj, indent=""):
        if isinstance(obj, dict):
            for k in sorted(obj):
                v = obj[k]
                if isinstance(v, (dict, list)) and not _is_matrix(v):
                    yield f"{indent}{k}:"
                    yield from lines(v, indent + "  ")
                else:
                    yield f"{indent}{k}: {_scalar(v)}"
        elif isinstance(obj, list):
            for i, v in enumerate(obj):
                if isinstance(v, (dict, list)) and not _is_matrix(v):
                    yield f"{indent}[{i}]"
                    yield from lines(v, indent + "  ")
                else:
                    yield f"{indent}[{i}] {_scalar(v)}"
    sys.stdout.write("\n".join(lines(report)) + "\n")


def _is_matrix(v) -> bool:
    return isinstance(v, list) and v and isinstance(v[0], list) \
        and v[0] and isinstance(v[0][0], list)


def _scalar(v):
    if _is_matrix(v):
        return f"<{len(v)}x{len(v[0])} matrix>"
    return v


def _spectrum(M: np.ndarray) -> list:
    eigs = sorted(np.linalg.eigvals(M),
                  key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    return [[round(float(z.real), 9), round(float(z.imag), 9)] for z in eigs]


def cmd_decompose(args) -> int:
    seed = _resolve_seed(args)
    pol = _resolve_policy(args, seed)
    T = sio.load_tuple(args.input)
    comm = validate_commuting(T, policy=pol)
    if not comm.passed:
        raise ValueError(
            f"input tuple does not commute at tolerance {pol.commute_tol} "
            f"(max relative commutator {comm.max_commutator:.3e})"
        )
    D = unit_si_decomposition(T, pol, seed)
    residuals = D.validate(pol)
    blocks = []
    for P in D.idempotents:
        from .tuples import restrict
        R = restrict(T, P, pol)
        blocks.append({"dim": R.d, "spectrum_first_component": _spectrum(R[0])})
    report = _header(args, seed, pol) | {
        "count": D.count,
        "si_flags": list(D.si_flags),
        "residuals": {k: float(v) for k, v in residuals.items()},
        "idempotents": [sio.matrix_to_obj(P) for P in D.idempotents],
        "blocks": blocks,
    }
    _emit(report, args.format)
    return EXIT_OK


def cmd_invariant(args) -> int:
    seed = _resolve_seed(args)
    pol = _resolve_policy(args, seed)
    T = sio.load_tuple(args.input)
    inv = v_semigroup_invariant(T, pol, seed)
    k0 = k0_descriptor(T, pol, seed, invariant=inv)
    report = _header(args, seed, pol) | {
        "k": inv.k,
        "multiplicities": list(inv.multiplicities),
        "class_dims": [r.d for r in inv.class_representatives],
        "class_spectra_first_component": [_spectrum(r[0]) for r in inv.class_representatives],
        "k0": {"rank": k0.rank, "order_unit": list(k0.order_unit)},
    }
    _emit(report, args.format)
    return EXIT_OK


def cmd_similar(args) -> int:
    seed = _resolve_seed(args)
    pol = _resolve_policy(args, seed)
    T = sio.load_tuple(args.input)
    S = sio.load_tuple(args.input2)
    verdict = similar_op(T, S, pol, seed, want_witness=args.witness)
    report = _header(args, seed, pol) | {
        "similar": verdict.similar,
        "reason": verdict.reason,
        "invariant_lhs": verdict.invariant_lhs.summary(),
        "invariant_rhs": verdict.invariant_rhs.summary(),
        "witness": None if verdict.witness is None else sio.matrix_to_obj(verdict.witness),
        "residual": verdict.residual,
    }
    _emit(report, args.format)
    return EXIT_OK


def _rkhs_checks(spec, grid, preset, pol, seed) -> list[dict]:
    checks = []

    def add(cid, passed, measure):
        checks.append({"id": cid, "passed": bool(passed), "measure": float(measure)})

    if preset == "spherical_shift":
        V = spherical_shift(grid)
        S = sum(A.conj().T @ A for A in V)
        idx = np.where(grid.interior())[0]
        dev = float(np.abs(S[np.ix_(idx, idx)] - np.eye(idx.size)).max()) if idx.size else 0.0
        add("interior-isometry", dev <= 1e-13, dev)
        rep = check_sphere_conditions(V, pol, mask=grid.interior())
        add("row-contraction", rep.row_contraction, rep.defect_min_eig)
        return checks

    adj = truncated_tuple(spec, grid, "adjoint")
    fwd = truncated_tuple(spec, grid, "forward")
    comm = validate_commuting(adj, policy=pol)
    add("adjoint-commutation", comm.max_commutator <= 1e-12, comm.max_commutator)

    # reconstruct the squared path products from the forward matrices and
    # compare against the coefficient rule: Gram diagonal of the monomials
    worst = 0.0
    for a in grid.indices:
        v = np.zeros(grid.size)
        v[grid.index_of[(0,) * grid.m]] = 1.0
        for i, reps in enumerate(a):
            for _ in range(reps):
                v = (fwd[i].real @ v)
        c2 = float(v[grid.index_of[a]]) ** 2
        want = math.exp(-spec.log_fhat(a))
        worst = max(worst, abs(c2 - want) / want)
    add("basis-norm-table", worst <= 1e-12, worst)

    if preset == "drury_arveson":
        rep = defect_operator(adj, grid)
        add("defect-rank-one", rep.rank_one_residual <= 1e-12, rep.rank_one_residual)
    if preset == "bergman_k":
        srep = check_sphere_conditions(adj, pol, n_hyper=1)
        add("hypercontraction-1", srep.hypercontraction[1], srep.defect_min_eig)

    ps = p_sequence(adj, grid, min(grid.dmax, 4), pol)
    add("p-sequence-chain", ps.psd_ok and ps.monotone_ok and ps.vanish_exact,
        max(ps.vanish_max_abs))

    w = np.full(grid.m, 0.25)
    v, resid = joint_eigenvector(spec, grid, w, tuple_adjoint=adj)
    tail = sum(spec.fhat(a) * abs(np.prod(np.power(w, a))) ** 2
               for a in grid.indices if sum(a) == grid.dmax)
    bound = 10.0 * float(np.linalg.norm(w)) * math.sqrt(tail) / float(np.linalg.norm(v))
    add("joint-eigenvector-tail", resid <= max(bound, 1e-13), resid)

    if preset == "drury_arveson":
        mh = check_model_hypotheses(adj, pol, seed, coordinate_mask=grid.interior())
        add("model-hypotheses", mh.model_consistent,
            max(mh.projection_residual, mh.solve_max_residual))
    return checks


def cmd_rkhs(args) -> int:
    import json
    seed = _resolve_seed(args)
    pol = _resolve_policy(args, seed)
    with open(args.input, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    spec, grid, preset = sio.kernel_job_from_obj(obj)
    checks = _rkhs_checks(spec, grid, preset, pol, seed)
    written = None
    if args.output:
        T = spherical_shift(grid) if preset == "spherical_shift" \
            else truncated_tuple(spec, grid, "adjoint")
        obj = sio.tuple_to_obj(T)
        # basis labels travel with the matrices so they stay portable
        obj["basis"] = {
            "kind": "multi-index", "m": grid.m, "dmax": grid.dmax,
            "enumeration": "graded-lexicographic",
            "indices": [list(a) for a in grid.indices],
        }
        obj["mode"] = "spherical-shift" if preset == "spherical_shift" else "adjoint"
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(sio.canonical_json(obj))
        written = args.output
    report = _header(args, seed, pol) | {
        "preset": preset,
        "m": grid.m,
        "dmax": grid.dmax,
        "basis_size": grid.size,
        "enumeration": "graded-lexicographic",
        "checks": checks,
        "tuple_written": written,
    }
    _emit(report, args.format)
    if not all(c["passed"] for c in checks):
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_selftest(args) -> int:
    seed = _resolve_seed(args)
    pol = _resolve_policy(args, seed)
    instances = planted_corpus(seed, args.count)
    recovered = 0
    failing = []
    for inst in instances:
        inv = v_semigroup_invariant(inst.realized, pol, seed)
        got = (inv.k, tuple(sorted(inv.multiplicities, reverse=True)))
        if got == (inst.k, inst.multiplicities):
            recovered += 1
        else:
            failing.append(inst.seed)
    oracle_agree = 0
    oracle_cases = si_oracle_corpus()
    oracle_failing = []
    for name, T, _ in oracle_cases:
        a = oracle_is_strongly_irreducible(T, seed=seed)
        b = is_strongly_irreducible(T, pol)
        if a == b:
            oracle_agree += 1
        else:
            oracle_failing.append(name)
    report = _header(args, seed, pol) | {
        "instances": len(instances),
        "recovered": recovered,
        "oracle_cases": len(oracle_cases),
        "oracle_agreements": oracle_agree,
        "failing_seeds": failing,
        "oracle_failures": oracle_failing,
    }
    _emit(report, args.format)
    if failing or oracle_failing:
        return EXIT_VIOLATION
    return EXIT_OK


_COMMANDS = {
    "decompose": cmd_decompose,
    "invariant": cmd_invariant,
    "similar": cmd_similar,
    "rkhs": cmd_rkhs,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalDegeneracyError as exc:
        print(f"numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE


if __name__ == "__main__":
    sys.exit(main())
