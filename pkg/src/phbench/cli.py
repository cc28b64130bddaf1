"""Command-line interface.

Subcommands:
  generate      build a benchmark instance and write its JSON description
  inspect       report properties of an instance (spectrum, Pauli table, ...)
  run           optimizer sweep over start distances, writing records.csv
  report        aggregate records into summary.csv plus a figure
  locality-scan minimal kernel-support statistics across system sizes

Report-style commands write a matplotlib figure next to their CSV unless
--no-plot is given.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import bench, plots
from .circuit import AnsatzSpec, build_ansatz, energy, gates_to_jsonable
from .linalg import KERNEL_TOL
from .mps import ansatz_to_mps, injectivity_length, mps_to_jsonable
from .optim import OptimizerConfig
from .parent import (
    build_parent_hamiltonian,
    exact_spectrum,
    hamiltonian_from_jsonable,
    hamiltonian_to_jsonable,
    pauli_decomposition,
)


def _parse_expr(token):
    """Float literal or a tiny arithmetic expression over 'pi' (e.g. 3*pi/4)."""
    token = token.strip()
    try:
        return float(token)
    except ValueError:
        pass
    allowed = set("0123456789.+-*/() pi")
    if not token or any(ch not in allowed for ch in token):
        raise argparse.ArgumentTypeError(f"cannot parse number {token!r}")
    try:
        return float(eval(token, {"__builtins__": {}}, {"pi": math.pi}))
    except Exception as exc:
        raise argparse.ArgumentTypeError(f"cannot parse number {token!r}: {exc}")


def _parse_r_grid(text):
    values = [_parse_expr(tok) for tok in text.split(",") if tok.strip()]
    if not values:
        raise argparse.ArgumentTypeError("empty r grid")
    return values


def _parse_qubit_list(text):
    """Comma list of sizes; 'a..b' expands to the even sizes a, a+2, ..., b."""
    sizes = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ".." in tok:
            lo, hi = tok.split("..", 1)
            sizes.extend(range(int(lo), int(hi) + 1, 2))
        else:
            sizes.append(int(tok))
    if not sizes:
        raise argparse.ArgumentTypeError("empty qubit list")
    return sizes


def _load_problem(path):
    with open(path) as fh:
        return hamiltonian_from_jsonable(json.load(fh))


def _figure_path(out_csv, override):
    if override is not None:
        return Path(override)
    return Path(out_csv).with_suffix(".png")


def _cmd_generate(args):
    spec = AnsatzSpec(args.qubits, args.depth)
    theta_ans = bench.sample_theta_ans(args.ans_seed, spec.num_params)
    ham = build_parent_hamiltonian(spec, theta_ans, args.kernel_tol)
    payload = hamiltonian_to_jsonable(
        ham, include_pauli=args.pauli, drop_below=args.pauli_drop
    )
    with open(args.out, "w") as fh:
        json.dump(payload, fh)
    span = ham.terms[0].span
    val = energy(theta_ans, ham)
    print(f"wrote {args.out}: N={args.qubits} depth={args.depth} "
          f"window span={span} E(theta_ans)={val:.3e}")
    return 0


def _cmd_inspect(args):
    ham = _load_problem(args.problem)
    spec = ham.ansatz_spec
    print(f"{args.problem}: N={ham.num_qubits} depth={spec.depth} "
          f"terms={len(ham.terms)} span={ham.terms[0].span} "
          f"kernel_tol={ham.kernel_tol:g}")
    print(f"E(theta_ans) = {energy(ham.theta_ans, ham):.6e}")

    if args.spectrum or args.plot_spectrum:
        vals = exact_spectrum(ham)
        print(f"spectrum: min={vals[0]:.6e} gap={vals[1] - vals[0]:.6e} "
              f"max={vals[-1]:.6e}")
        if args.spectrum:
            for k, v in enumerate(vals):
                print(f"  level {k}: {v:.12e}")
        if args.plot_spectrum:
            plots.plot_spectrum(vals, args.plot_spectrum)
            print(f"wrote {args.plot_spectrum}")

    if args.pauli:
        terms = pauli_decomposition(ham.terms[0], args.pauli_drop)
        print(f"anchor-0 term in the Pauli basis ({len(terms)} strings, "
              f"|coeff| >= {args.pauli_drop:g}; other anchors follow by "
              f"translation):")
        for t in sorted(terms, key=lambda t: -abs(t.coeff)):
            print(f"  {t.label}  {t.coeff:+.12f}")

    if args.injectivity:
        mps = ansatz_to_mps(spec, ham.theta_ans)
        length = injectivity_length(mps)
        print(f"bond dimension D = {mps.bond_dim}; "
              f"injectivity length = {length}")

    if args.dump_mps:
        mps = ansatz_to_mps(spec, ham.theta_ans)
        with open(args.dump_mps, "w") as fh:
            json.dump(mps_to_jsonable(mps), fh)
        print(f"wrote {args.dump_mps}")

    if args.dump_gates:
        with open(args.dump_gates, "w") as fh:
            json.dump(gates_to_jsonable(build_ansatz(spec)), fh)
        print(f"wrote {args.dump_gates}")
    return 0


def _cmd_run(args):
    ham = _load_problem(args.problem)
    cfg = OptimizerConfig(
        method=args.optimizer,
        grad_tol=args.grad_tol,
        f_tol=args.f_tol,
        max_iters=args.max_iters,
    )
    records, _ = bench.run_sweep_from_hamiltonian(
        ham, args.r_grid, args.trials, args.seed, cfg, workers=args.workers
    )
    bench.write_records_csv(records, args.out)
    n_success = sum(
        rec.converged_energy < bench.SUCCESS_ENERGY for rec in records
    )
    print(f"wrote {args.out}: {len(records)} trials, "
          f"{n_success} reached the ground state")
    return 0


def _cmd_report(args):
    records = bench.read_records_csv(args.records)
    rows = bench.summarize(records)
    bench.write_summary_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} radii, "
          f"{len(records)} trials; band = empirical 5th-95th percentile)")
    if not args.no_plot:
        fig_path = _figure_path(args.out, args.plot)
        plots.plot_sweep_summary(rows, fig_path)
        print(f"wrote {fig_path}")
    return 0


def _cmd_locality_scan(args):
    rows = bench.locality_scan([args.depth], args.qubits, args.samples,
                               seed=args.seed)
    bench.write_locality_csv(rows, args.out)
    for row in rows:
        print(f"N={row['num_qubits']}: support min={row['support_min']} "
              f"mean={row['support_mean']:.2f} max={row['support_max']}")
    print(f"wrote {args.out}")
    if not args.no_plot:
        fig_path = _figure_path(args.out, args.plot)
        plots.plot_locality(rows, fig_path)
        print(f"wrote {fig_path}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="phbench",
        description="Benchmark problems with a known reachable ground state, "
                    "plus an optimizer test harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build an instance and write JSON")
    p.add_argument("--qubits", type=int, required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--ans-seed", type=int, default=0,
                   help="seed for the hidden answer angles")
    p.add_argument("--kernel-tol", type=float, default=KERNEL_TOL)
    p.add_argument("--pauli", action="store_true",
                   help="include Pauli expansions in the JSON")
    p.add_argument("--pauli-drop", type=float, default=1e-8,
                   help="omit Pauli coefficients below this magnitude")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("inspect", help="report properties of an instance")
    p.add_argument("problem")
    p.add_argument("--spectrum", action="store_true",
                   help="print all eigenvalues (dense diagonalization)")
    p.add_argument("--pauli", action="store_true",
                   help="print the anchor-0 term in the Pauli basis")
    p.add_argument("--pauli-drop", type=float, default=1e-8)
    p.add_argument("--injectivity", action="store_true")
    p.add_argument("--dump-mps", metavar="PATH",
                   help="write the compiled MPS as JSON")
    p.add_argument("--dump-gates", metavar="PATH",
                   help="write the ansatz gate list as JSON")
    p.add_argument("--plot-spectrum", metavar="PATH",
                   help="render the spectrum to an image file")
    p.set_defaults(func=_cmd_inspect)

    p = sub.add_parser("run", help="optimizer sweep, writes records.csv")
    p.add_argument("--problem", required=True)
    p.add_argument("--optimizer", default="bfgs",
                   choices=["bfgs", "cg", "nelder-mead"])
    p.add_argument("--r-grid", type=_parse_r_grid,
                   default=bench.default_r_grid(),
                   help="comma list; 'pi' expressions allowed "
                        "(default: 13 points over [0, pi])")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--grad-tol", type=float, default=1e-8)
    p.add_argument("--f-tol", type=float, default=1e-12)
    p.add_argument("--max-iters", type=int, default=10000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("report", help="summarize records into CSV + figure")
    p.add_argument("records")
    p.add_argument("--out", required=True)
    p.add_argument("--plot", metavar="PATH",
                   help="figure path (default: CSV path with .png)")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(func=_cmd_report)

    p = sub.add_parser("locality-scan",
                       help="minimal kernel-support statistics vs system size")
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--qubits", type=_parse_qubit_list, required=True,
                   help="comma list of even sizes; 'a..b' steps by 2")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot", metavar="PATH")
    p.add_argument("--no-plot", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_locality_scan)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
