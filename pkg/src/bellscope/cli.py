"""``bellscope`` command line: one JSON report per invocation on stdout.

Exit codes: 0 success, 1 usage or validation error, 2 a computed value broke
a bound it cannot break (falsification report still printed).
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, boole, lhv, quantum
from ._validation import check_probabilities
from .bell_operator import CommutationRegime
from .exceptions import BellscopeError
from .regime_bounds import OptimizerConfig, optimize_bound, verify_ceiling

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FALSIFIED = 2

LHV_BOUND = 2.0
QUANTUM_BOUND = 2.0 * math.sqrt(2.0)
_VALUE_FLAGS = ("--angles", "--scan", "--probs")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _scan_spec(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("scan must be start:stop:step")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad scan descriptor {text!r}") from None


def _settings(args) -> quantum.MeasurementSettings:
    angles = list(args.angles)
    if len(angles) != 4:
        raise BellscopeError(f"--angles needs 4 values, got {len(angles)}")
    if args.degrees:
        angles = [math.radians(a) for a in angles]
    return quantum.MeasurementSettings.from_sequence(angles)


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("--out-dir", type=Path, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bellscope", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"bellscope {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="maximize the Bell value within a commutation regime")
    _add_common(p)
    p.add_argument("--regime", choices=[r.value for r in CommutationRegime], required=True)
    p.add_argument("--dim", type=int, default=None, help="factor dim (tensor) or total dim (global)")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--initial-step", type=float, default=0.1)
    p.add_argument("--step-decay", type=float, default=0.7)
    p.add_argument("--fd-epsilon", type=float, default=1e-5)
    p.add_argument("--observable-class", choices=["dichotomic", "contraction"], default="dichotomic")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("lhv", help="hidden-variable CHSH value by quadrature or Monte Carlo")
    _add_common(p)
    _add_model_args(p)
    p.add_argument("--method", choices=[m.value for m in lhv.Method], default="quadrature")
    p.add_argument("--nodes", type=int, default=lhv.DEFAULT_NODES)
    p.add_argument("--samples", type=int, default=lhv.DEFAULT_SAMPLES)
    p.add_argument("--audit", action="store_true", help="also run the derivation audits")

    p = sub.add_parser("quantum", help="CHSH value, coincidence tables or angle scan for a two-particle state")
    _add_common(p)
    p.add_argument("--state", choices=[k.value for k in quantum.StateKind], required=True)
    p.add_argument("--angles", type=_float_list, default=None)
    p.add_argument("--degrees", action="store_true")
    p.add_argument("--scan", type=_scan_spec, default=None, metavar="START:STOP:STEP")
    p.add_argument("--tables", action="store_true")

    p = sub.add_parser("boole", help="Boole union/intersection bounds")
    _add_common(p)
    p.add_argument("--probs", type=_float_list, required=True)
    p.add_argument("--oracle", action="store_true")
    p.add_argument("--grid", type=int, default=10)
    p.add_argument("--witnesses", action="store_true")

    p = sub.add_parser("audit", help="zero-expression, interchange and difference audits of a hidden-variable model")
    _add_common(p)
    _add_model_args(p)
    p.add_argument("--nodes", type=int, default=lhv.DEFAULT_NODES)
    return parser


def _add_model_args(p):
    p.add_argument("--model", default="sign-cos", help=f"built-in model: {', '.join(lhv.BUILTIN_MODELS)}")
    p.add_argument("--model-file", type=Path, default=None, help="CSV response table (lambda,response)")
    p.add_argument("--model-file-b", type=Path, default=None, help="optional separate table for side b")
    p.add_argument("--angles", type=_float_list, default=[0.0, math.pi / 2, math.pi / 4, 3 * math.pi / 4])
    p.add_argument("--degrees", action="store_true")


def _model(args) -> lhv.HiddenVariableModel:
    if args.model_file is not None:
        return lhv.model_from_csv(args.model_file, args.model_file_b)
    return lhv.get_model(args.model)


# --- subcommands --------------------------------------------------------------

def cmd_bounds(args):
    regime = CommutationRegime(args.regime)
    dim = args.dim if args.dim is not None else (2 if regime is CommutationRegime.LOCAL_TENSOR else 4)
    cfg = OptimizerConfig(
        dim=dim, restarts=args.restarts, max_iters=args.iters, initial_step=args.initial_step,
        step_decay=args.step_decay, seed=args.seed, spectrum_class=args.observable_class,
        fd_epsilon=args.fd_epsilon, n_jobs=args.jobs,
    )
    result = optimize_bound(regime, cfg)
    ok = verify_ceiling(result)
    config = cfg.to_dict()
    config.pop("n_jobs")
    config["regime"] = regime.value
    payload = {
        "bestValue": result.best_value,
        "ceiling": result.ceiling,
        "verdict": "pass" if ok else "falsified",
        "perRestartValues": list(result.per_restart_values),
        "iterations": result.iterations,
        "maxGramEigenvalue": result.max_gram_eigenvalue,
    }
    if result.witness_signs is not None:
        payload["witnessSigns"] = list(result.witness_signs)
    if not ok:
        payload["falsification"] = (f"best value {result.best_value!r} exceeds the {regime.value} "
                                    f"ceiling {result.ceiling!r}")
    return config, payload, ok


def cmd_lhv(args):
    model = _model(args)
    settings = _settings(args)
    method = lhv.Method(args.method)
    budget = args.nodes if method is lhv.Method.QUADRATURE else args.samples
    est = lhv.chsh_estimate(model, settings, method, budget, seed=args.seed)
    limit = LHV_BOUND + (1e-6 if method is lhv.Method.QUADRATURE else 5.0 * est.stderr)
    ok = abs(est.value) <= limit
    payload = {
        "model": model.name,
        "method": method.value,
        "chsh": est.value,
        "stderr": est.stderr,
        "correlations": [
            {"alpha": al, "beta": be, "sign": sign, "value": e.value, "stderr": e.stderr}
            for ((al, be), sign), e in zip(settings.pairs(), est.correlations)
        ],
    }
    if args.audit:
        payload["audit"] = _audits(model, settings, args.nodes)
    if not ok:
        payload["falsification"] = f"|chsh| = {abs(est.value)!r} exceeds local bound {limit!r}"
    config = {"model": model.name, "angles": list(settings.as_tuple()), "method": method.value, "budget": budget}
    return config, payload, ok


def _audits(model, settings, nodes):
    lhs, rhs = lhv.bell_difference_decomposition(model, settings.a, settings.b, settings.b_prime, nodes)
    return {
        "zeroExpressionResidue": lhv.zero_expression_audit(model, settings, nodes),
        "interchangeGap": lhv.interchange_gap(model, settings.a, settings.b, settings.b_prime, nodes),
        "differenceDecomposition": {"lhs": lhs, "rhs": rhs, "residue": abs(lhs - rhs)},
    }


def cmd_audit(args):
    model = _model(args)
    settings = _settings(args)
    config = {"model": model.name, "angles": list(settings.as_tuple()), "nodes": args.nodes}
    return config, _audits(model, settings, args.nodes), True


def cmd_quantum(args):
    state = quantum.TwoParticleState.from_name(args.state)
    config = {"state": state.kind.value}
    payload = {}
    ok = True
    if args.scan is not None:
        start, stop, step = args.scan
        if args.degrees:
            start, stop, step = (math.radians(v) for v in (start, stop, step))
        rows = quantum.angle_scan(state, quantum.scan_offsets(start, stop, step))
        out_dir = args.out_dir or Path(".")
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path = out_dir / f"scan_{state.kind.value}.csv"
        quantum.write_scan_csv(rows, csv_path)
        values = [v for _, v in rows]
        config["scan"] = [start, stop, step]
        payload.update({"scanCsv": str(csv_path), "scanPoints": len(rows),
                        "scanMax": max(values), "scanMin": min(values)})
        ok = max(abs(v) for v in values) <= QUANTUM_BOUND + 1e-9
    if args.angles is not None or args.scan is None:
        if args.angles is None:
            settings = quantum.CANONICAL_SETTINGS[state.kind]
        else:
            settings = _settings(args)
        value = quantum.chsh_value(state, settings)
        config["angles"] = list(settings.as_tuple())
        payload["chsh"] = value
        ok = ok and abs(value) <= QUANTUM_BOUND + 1e-9
        if args.tables:
            table = quantum.coincidence_table(state, settings)
            payload["coincidences"] = [
                {"alpha": al, "beta": be, "pp": pp, "pm": pm, "mp": mp, "mm": mm}
                for (al, be), (pp, pm, mp, mm) in table.entries.items()
            ]
    if not ok:
        payload["falsification"] = "quantum CHSH value exceeded 2*sqrt(2)"
    return config, payload, ok


def cmd_boole(args):
    probs = check_probabilities(args.probs)
    u = boole.union_bounds(probs)
    i = boole.intersection_bounds(probs)
    payload = {"union": [u.lo, u.hi], "intersection": [i.lo, i.hi]}
    ok = True
    if args.oracle:
        ext = boole.oracle_extremes(probs, args.grid)
        tol = 1.0 / args.grid
        agree = all(abs(x - y) <= tol for x, y in ((ext.union.lo, u.lo), (ext.union.hi, u.hi),
                                                     (ext.intersection.lo, i.lo), (ext.intersection.hi, i.hi)))
        payload["oracle"] = {"union": [ext.union.lo, ext.union.hi],
                             "intersection": [ext.intersection.lo, ext.intersection.hi],
                             "gridResolution": args.grid, "matchesFormulas": agree}
        ok = agree
    if args.witnesses:
        payload["witnesses"] = {}
        for t in boole.Target:
            w = boole.witness(probs, t)
            entry = {"joint": w.joint.tolist(), "union": w.union_probability(),
                     "intersection": w.intersection_probability()}
            if args.out_dir is not None:
                args.out_dir.mkdir(parents=True, exist_ok=True)
                path = args.out_dir / f"witness_{t.value}.csv"
                boole.write_joint_csv(w, path)
                entry["csv"] = str(path)
            payload["witnesses"][t.value] = entry
    if not ok:
        payload["falsification"] = "oracle extremes disagree with the closed-form bounds"
    config = {"probs": probs.tolist(), "oracle": args.oracle, "grid": args.grid}
    return config, payload, ok


COMMANDS = {"bounds": cmd_bounds, "lhv": cmd_lhv, "quantum": cmd_quantum, "boole": cmd_boole, "audit": cmd_audit}


def _join_value_flags(argv):
    """Attach values such as ``-0.3:0.3:0.01`` to their flag so argparse does not read them as options."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(_join_value_flags(argv))
        config, payload, ok = COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"bellscope: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BellscopeError, OSError) as exc:
        print(f"bellscope: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "toolVersion": __version__,
        "command": args.command,
        "config": config,
        "seed": args.seed,
        "results": payload,
        "wallTimeMs": int(round((time.perf_counter() - t0) * 1000)),
    }
    stdout.write(json.dumps(report, indent=2, default=_json_default) + "\n")
    return EXIT_OK if ok else EXIT_FALSIFIED


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
