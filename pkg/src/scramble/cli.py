"""Command-line front end: ``scramble {table,sweep,compute,list}``."""
from __future__ import annotations

import argparse
import json
import re
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .accessible import (SWEEP_QUANTITIES, ClassicalQuantumEnsemble, EncodingBasis, InducedChannel,
                         OptimizerSettings, accessible_info_channel, accessible_info_fixed_encoding, basis_sweep,
                         check_result, i3_acc, j3_acc_fixed_encoding, j3_acc_optimized)
from .errors import ConfigurationError, PartitionError, ScrambleError
from .states import REGISTRY_NAMES, double_arm_i3, example_registry, get_example, single_arm_i3

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

TABLE_DYNAMICS = ("van", "pos", "neg", "W3")
TABLE_PAIRS = (("1", "2"), ("1", "3"), ("2", "3"))
COMPUTE_QUANTITIES = ("I3", "I3_acc", "j3_fixed", "J3_acc", "Iacc")

_ANGLE = re.compile(r"^\s*([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\s*\*?\s*(?:pi|π)\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$", re.I)


def parse_angle(text: str) -> float:
    """Radians from '5pi/6', '-pi/3', '2*pi', 'π/2' or a plain number."""
    m = _ANGLE.match(text)
    if m:
        coeff = m.group(1)
        if coeff in ("", "+", "-"):
            coeff += "1"
        return float(coeff) * np.pi / (float(m.group(2)) if m.group(2) else 1.0)
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an angle: {text!r} (use radians or a multiple of pi)") from None


def parse_grid(text: str) -> tuple[int, int]:
    parts = re.split(r"[x×]", text.strip().lower())
    try:
        dims = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 24 or 24x24, got {text!r}") from None
    if len(dims) == 1:
        dims = dims * 2
    if len(dims) != 2 or min(dims) < 2:
        raise argparse.ArgumentTypeError(f"grid must be NxM with N, M >= 2, got {text!r}")
    return dims


def parse_partition(text: str) -> dict[str, tuple[str, ...]]:
    """'C=1;D=2' or 'C=1,2;D=3' into {'C': ('1',), 'D': ('2',)}."""
    groups = {}
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        if "=" not in chunk:
            raise argparse.ArgumentTypeError(f"partition group {chunk!r} needs the form NAME=label[,label]")
        name, labels = (s.strip() for s in chunk.split("=", 1))
        labels = tuple(l.strip() for l in labels.split(",") if l.strip())
        if name not in ("C", "D") or not labels:
            raise argparse.ArgumentTypeError(f"partition groups are C=... and D=..., got {chunk!r}")
        if name in groups:
            raise argparse.ArgumentTypeError(f"group {name} given twice")
        groups[name] = labels
    if "C" not in groups:
        raise argparse.ArgumentTypeError(f"partition {text!r} has no C group")
    return groups


def _num(x: float) -> float:
    # stable JSON: fixed precision and no negative zero
    return float(round(float(x), 12)) + 0.0


def _dump(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _settings(args, use_grid: bool = True) -> OptimizerSettings:
    changes = {"seed": args.seed}
    if use_grid and args.grid is not None:
        n, m = args.grid
        if n != m:
            raise ConfigurationError("optimizer grids are square; use NxN")
        changes["grid"] = n
    if args.oracle_samples is not None:
        changes["oracle_samples"] = args.oracle_samples
    return OptimizerSettings().replace(**changes)


@dataclass
class _Flags:
    converged: bool = True
    oracle_ok: bool = True

    def absorb(self, converged: bool, oracle: dict | None = None):
        self.converged &= bool(converged)
        if oracle is not None:
            self.oracle_ok &= oracle["status"] != "fail"

    @property
    def ok(self) -> bool:
        return self.converged and self.oracle_ok


def _oracle(result, settings, flags: _Flags, optimize_weights=True) -> dict:
    check = check_result(result, settings.oracle_samples, settings.seed, optimize_weights).as_dict()
    check["best_sample"] = _num(check["best_sample"])
    flags.absorb(result.converged, check)
    return check


def _summand_doc(result, settings, flags, optimize_weights=True) -> dict:
    doc = {"value": _num(result.value), "converged": bool(result.converged),
           "oracle": _oracle(result, settings, flags, optimize_weights),
           "measurement_parameters": [_num(x) for x in result.measurement.parameters]}
    if result.encoding is not None:
        doc["encoding"] = {"theta": _num(result.encoding.theta), "phi": _num(result.encoding.phi)}
        doc["weights"] = [_num(x) for x in result.weights]
    return doc


def _tripartite_doc(result, settings, flags, optimize_weights=True, memo: dict | None = None) -> dict:
    # memo: summands shared between pairs (same result object) are documented and checked once
    memo = {} if memo is None else memo
    summands = {}
    for k, s in zip(("R:C", "R:D", "R:CD"), result.summands):
        if id(s) not in memo:
            memo[id(s)] = (s, _summand_doc(s, settings, flags, optimize_weights))
        summands[k] = memo[id(s)][1]
    doc = {"value": _num(result.value), "converged": bool(result.converged), "summands": summands}
    flags.absorb(result.converged)
    if result.encoding is not None:
        doc["argmax"] = {"theta": _num(result.encoding.theta), "phi": _num(result.encoding.phi),
                         "weights": [_num(x) for x in result.weights]}
    return doc


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _finish(flags: _Flags, strict: bool) -> int:
    if flags.ok:
        return EXIT_OK
    what = "non-converged optimisation" if not flags.converged else "random-sampling oracle beat the optimiser"
    print(f"warning: {what}", file=sys.stderr)
    return EXIT_NUMERICAL if strict else EXIT_OK


# -- subcommands -------------------------------------------------------------

def run_table(args) -> int:
    settings = _settings(args)
    flags = _Flags()
    rows = {}
    started = time.perf_counter()
    for name in TABLE_DYNAMICS:
        v = get_example(name).generator
        cache: dict = {}
        memo: dict = {}
        row = {"I3": {}, "I3_acc": {}, "J3_acc": {}}
        for c, d in TABLE_PAIRS:
            key = f"R:{c}:{d}"
            row["I3"][key] = _num(single_arm_i3(v, c, d))
            row["I3_acc"][key] = _tripartite_doc(i3_acc(v, c, d, settings, cache=cache), settings, flags,
                                                 memo=memo)
            row["J3_acc"][key] = _tripartite_doc(j3_acc_optimized(v, c, d, settings), settings, flags,
                                                 optimize_weights=False)
        rows[name] = row
        if args.verbose:
            print(f"{name}: done after {time.perf_counter() - started:.1f} s", file=sys.stderr)
    doc = {"kind": "table", "version": __version__, "seed": args.seed, "optimizer": settings.to_dict(),
           "pairs": [f"R:{c}:{d}" for c, d in TABLE_PAIRS], "rows": rows,
           "converged": flags.converged, "oracle_ok": flags.oracle_ok}
    if args.out:
        _emit(_dump(doc), args.out)
    if args.json:
        sys.stdout.write(_dump(doc))
    else:
        sys.stdout.write(format_table(doc))
    return _finish(flags, args.strict)


def format_table(doc: dict) -> str:
    """Fixed-width text rendering of the table document."""
    pairs = doc["pairs"]
    head = ["dynamics", "I3"] + [f"I3acc({p[2:]})" for p in pairs] + [f"J3acc({p[2:]})" for p in pairs]
    lines = ["  ".join(f"{h:>12}" for h in head)]
    for name, row in doc["rows"].items():
        i3 = row["I3"][pairs[0]]
        cells = [name, f"{i3:.3f}"]
        for col in ("I3_acc", "J3_acc"):
            for p in pairs:
                cell = row[col][p]
                mark = "" if cell["converged"] else "*"
                cells.append(f"{cell['value']:.3f}{mark}")
        lines.append("  ".join(f"{c:>12}" for c in cells))
    if not doc["converged"]:
        lines.append("* optimiser did not converge for this cell")
    return "\n".join(lines) + "\n"


def _partition_for(args, v, default=("1", "2")) -> tuple[tuple[str, ...], tuple[str, ...] | None]:
    part = args.partition
    if part is None:
        outs = v.output_layout.labels
        if len(outs) == 2:
            return (outs[0],), (outs[1],)
        return (default[0],), (default[1],)
    for labels in part.values():
        for l in labels:
            if l not in v.output_layout:
                raise PartitionError(f"label {l!r} is not an output of this dynamics ({', '.join(v.output_layout.labels)})")
    c, d = part["C"], part.get("D")
    if d is not None and set(c) & set(d):
        raise PartitionError(f"C={c} and D={d} overlap")
    return c, d


def _ensemble(args) -> ClassicalQuantumEnsemble | None:
    if args.theta is None and args.phi is None:
        return None
    if args.theta is None or args.phi is None:
        raise ConfigurationError("give both --theta and --phi")
    p0 = 0.5 if args.p0 is None else args.p0
    return ClassicalQuantumEnsemble.from_encoding(EncodingBasis(args.theta, args.phi), (p0, 1 - p0))


def run_compute(args) -> int:
    settings = _settings(args)
    example = get_example(args.dynamics)
    v = example.generator
    c, d = _partition_for(args, v)
    needs_d = args.quantity != "Iacc"
    if needs_d and d is None:
        raise PartitionError(f"{args.quantity} needs both C and D groups")
    flags = _Flags()
    ens = _ensemble(args)
    doc = {"kind": "compute", "version": __version__, "dynamics": args.dynamics, "quantity": args.quantity,
           "partition": {"C": list(c), "D": list(d) if d else None}, "seed": args.seed,
           "optimizer": settings.to_dict()}
    if ens is not None:
        doc["encoding"] = {"theta": _num(args.theta), "phi": _num(args.phi), "p0": _num(ens.weights[0])}
    if args.quantity == "I3":
        if len(v.input_layout) == 2 and v.is_unitary:
            if set(c + d) != set(v.output_layout.labels):
                raise PartitionError(f"the double-arm state needs C and D to cover {v.output_layout.labels}")
            value, doc["state"] = double_arm_i3(v), "double-arm"
        else:
            value, doc["state"] = single_arm_i3(v, c, d), "single-arm"
    else:
        if v.input_layout.dim != 2:
            raise ConfigurationError(f"{args.quantity} needs a qubit-input isometry; {args.dynamics} has input "
                                     f"dimension {v.input_layout.dim}")
        if args.quantity == "Iacc":
            ch = InducedChannel(v, c)
            if ens is not None:
                res = accessible_info_fixed_encoding(ens, ch, c, settings)
            else:
                weights = None if args.p0 is None else (args.p0, 1 - args.p0)
                res = accessible_info_channel(ch, c, settings, optimize_weights=weights is None, weights=weights)
            doc["result"] = _summand_doc(res, settings, flags, optimize_weights=args.p0 is None)
            value = res.value
        elif args.quantity == "I3_acc":
            res = i3_acc(v, c, d, settings)
            doc["result"], value = _tripartite_doc(res, settings, flags), res.value
        elif args.quantity == "j3_fixed":
            if ens is None:
                raise ConfigurationError("j3_fixed needs --theta and --phi")
            res = j3_acc_fixed_encoding(v, c, d, ens, settings)
            doc["result"], value = _tripartite_doc(res, settings, flags), res.value
        else:
            res = j3_acc_optimized(v, c, d, settings, optimize_weights=args.optimize_weights)
            doc["result"] = _tripartite_doc(res, settings, flags, optimize_weights=args.optimize_weights)
            value = res.value
    doc["value"] = _num(value)
    doc["converged"], doc["oracle_ok"] = flags.converged, flags.oracle_ok
    print(f"{value:.10g}")
    if args.out:
        _emit(_dump(doc), args.out)
    return _finish(flags, args.strict)


def run_sweep(args) -> int:
    settings = _settings(args, use_grid=False)
    v = get_example(args.dynamics).generator
    c, d = _partition_for(args, v)
    if d is None:
        raise PartitionError("sweeps need both C and D groups")
    result = basis_sweep(v, c, d, args.grid, args.quantity, settings)
    text = result.to_csv()
    _emit(text, args.out)
    flags = _Flags(converged=bool(result.flags.all()))
    if args.verbose:
        value, theta, phi = result.argmax()
        print(f"max {value:.6f} at theta={theta:.6f}, phi={phi:.6f}", file=sys.stderr)
    return _finish(flags, args.strict)


def run_list(args) -> int:
    rows = []
    for ex in example_registry():
        name = ex.name
        if name.startswith("perfect-tensor-"):
            name = "perfect-tensor-d (d odd)"
            ins = " ".join(f"{l}[d]" for l in ex.generator.input_layout.labels)
            outs = " ".join(f"{l}[d]" for l in ex.output_labels)
        else:
            ins = " ".join(f"{l}[{k}]" for l, k in ex.generator.input_layout.subsystems)
            outs = " ".join(f"{l}[{k}]" for l, k in ex.generator.output_layout.subsystems)
        rows.append((name, f"{ins} -> {outs}", ex.definition))
    width = max(len(r[0]) for r in rows)
    dims = max(len(r[1]) for r in rows)
    for name, shape, definition in rows:
        print(f"{name:<{width}}  {shape:<{dims}}  {definition}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scramble", description="Tripartite-information diagnostics of scrambling.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid_help="optimizer grid per angle, N or NxN (default 24)"):
        p.add_argument("--seed", type=int, default=0, help="seed for random candidates and oracle draws")
        p.add_argument("--grid", type=parse_grid, default=None, help=grid_help)
        p.add_argument("--out", default=None, help="write the machine-readable output here")
        p.add_argument("--strict", action="store_true", help="exit 3 on convergence or oracle failures")
        p.add_argument("--oracle-samples", type=int, default=None,
                       help="random measurements per oracle check (0 disables)")
        p.add_argument("-v", "--verbose", action="store_true")

    t = sub.add_parser("table", help="reproduce the comparison table of all quantifiers")
    common(t)
    t.add_argument("--json", action="store_true", help="print the JSON document instead of the text table")
    t.set_defaults(func=run_table)

    s = sub.add_parser("sweep", help="grid of a quantity over encoding bases, written as CSV")
    common(s, grid_help="sweep grid NxM over theta x phi (default 24x24)")
    s.add_argument("--dynamics", required=True, metavar="NAME", help=", ".join(REGISTRY_NAMES))
    s.add_argument("--partition", type=parse_partition, default=None, metavar="C=1;D=2")
    s.add_argument("--quantity", choices=SWEEP_QUANTITIES, default="j3")
    s.set_defaults(func=run_sweep)

    c = sub.add_parser("compute", help="a single quantity with a provenance document")
    common(c)
    c.add_argument("--dynamics", required=True, metavar="NAME", help=", ".join(REGISTRY_NAMES))
    c.add_argument("--partition", type=parse_partition, default=None, metavar="C=1;D=2")
    c.add_argument("--quantity", choices=COMPUTE_QUANTITIES, required=True)
    c.add_argument("--theta", type=parse_angle, default=None, help="encoding polar angle (e.g. pi/2)")
    c.add_argument("--phi", type=parse_angle, default=None, help="encoding azimuth (e.g. 5pi/6)")
    c.add_argument("--p0", type=float, default=None, help="weight of register value 0")
    c.add_argument("--optimize-weights", action="store_true", help="J3_acc: also optimise the weights")
    c.set_defaults(func=run_compute)

    l = sub.add_parser("list", help="registry of example dynamics")
    l.set_defaults(func=run_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "grid", None) is None and args.command == "sweep":
        args.grid = (24, 24)
    p0 = getattr(args, "p0", None)
    if p0 is not None and not 0.0 <= p0 <= 1.0:
        parser.error(f"--p0 must lie in [0, 1], got {p0}")
    try:
        return args.func(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ScrambleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
