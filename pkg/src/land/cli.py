"""Command-line interface: ``land {select,screen,synth,eval,nhsic}``.

Exit status is 0 on success, 1 for invalid input or usage, 2 for I/O errors.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass

import numpy as np

from land.dataio import atomic_write_text, load_dataset, split, synth_generate, write_csv
from land.kernelmap import HSIC, NHSIC, KernelConfig, build_output_map, full_normalized_kernel
from land.metrics import auc, dimensionality_reduction_rate, independence_rate, screen_mr_nhsic
from land.numerics import ValidationError
from land.scoring import EngineConfig, FeatureMaps, default_workers, nhsic_approx, nhsic_exact, relevance_pass
from land.solver import land_select

log = logging.getLogger("land")


class UsageError(ValidationError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass(frozen=True)
class RunConfig:
    m: int = 10
    b: int = 20
    sigma_u: float = 1.0
    sigma_y: float = 1.0
    score_mode: str = NHSIC
    workers: int = 1
    seed: int = 0
    task: str = "auto"

    def kernel(self):
        return KernelConfig(self.sigma_u, self.sigma_y, self.b, None, self.score_mode)

    def engine(self):
        return EngineConfig(self.workers)


def _add_data_args(p):
    p.add_argument("--input", required=True, help="dataset path")
    p.add_argument("--format", choices=("csv", "libsvm"), default="csv")
    p.add_argument("--header", action="store_true", help="first CSV row holds column names")
    p.add_argument("--task", choices=("auto", "regression", "classification"), default="auto")


def _add_kernel_args(p):
    p.add_argument("--b", type=int, default=20, help="number of Nystrom basis points")
    p.add_argument("--sigma-u", type=float, default=1.0)
    p.add_argument("--sigma-y", type=float, default=1.0)
    p.add_argument("--score", choices=(NHSIC, HSIC), default=NHSIC)
    p.add_argument("--workers", type=int, default=None, help="scoring threads (env LAND_WORKERS)")


def build_parser():
    parser = _Parser(prog="land", description="HSIC Lasso feature selection by non-negative LARS")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("select", help="run LAND and write a selection report")
    _add_data_args(p)
    _add_kernel_args(p)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=None)
    p.add_argument("--out", default=None, help="JSON report (default: stdout)")
    p.add_argument("--path", default=None, help="TSV file with one row per breakpoint")

    p = sub.add_parser("screen", help="rank features by marginal NHSIC (MR-NHSIC)")
    _add_data_args(p)
    _add_kernel_args(p)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--train-fraction", type=float, default=None)
    p.add_argument("--out", default=None)

    p = sub.add_parser("synth", help="write the synthetic benchmark as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--relevant", type=int, default=3)
    p.add_argument("--irrelevant", type=int, default=997)
    p.add_argument("--redundant", type=int, default=1000)
    p.add_argument("--noise", type=float, default=0.1, help="output noise scale")
    p.add_argument("--copy-noise", type=float, default=0.01, help="noise on redundant copies")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--header", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="metrics for a feature list")
    _add_data_args(p)
    p.add_argument("--features", default=None, help="comma-separated 0-based indices")
    p.add_argument("--selection", default=None, help="report JSON from select/screen")
    p.add_argument("--scores", default=None, help="file with one prediction score per observation")
    p.add_argument("--out", default=None)

    p = sub.add_parser("nhsic", help="print the NHSIC matrix of listed features and the target")
    _add_data_args(p)
    _add_kernel_args(p)
    p.add_argument("--features", required=True)
    p.add_argument("--oracle", action="store_true", help="exact full-kernel computation")
    p.add_argument("--out", default=None)
    return parser


def _workers(args):
    return args.workers if args.workers is not None else default_workers()


def _run_config(args):
    return RunConfig(
        m=getattr(args, "m", 10),
        b=args.b,
        sigma_u=args.sigma_u,
        sigma_y=args.sigma_y,
        score_mode=args.score,
        workers=_workers(args),
        seed=getattr(args, "seed", 0),
        task=args.task,
    )


def _parse_indices(text, d):
    try:
        idx = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError(f"bad feature list {text!r}") from None
    if not idx or any(not 0 <= k < d for k in idx):
        raise ValidationError(f"feature indices must lie in [0, {d})")
    return idx


def _emit(text, out):
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _dumps(obj):
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def _load(args):
    ds = load_dataset(args.input, args.format, args.header, args.task)
    log.info("loaded %s: d=%d n=%d task=%s", args.input, ds.d, ds.n, ds.task)
    return ds


def _training_data(args, ds):
    if getattr(args, "train_fraction", None) is None:
        return ds
    train, _ = split(ds, args.train_fraction, args.seed)
    return train


def _selection_metrics(ds, selected):
    ind = independence_rate(ds.X[list(selected)]) if len(selected) >= 2 else None
    return {
        "independence_rate": ind,
        "reduction_rate": dimensionality_reduction_rate(len(selected), ds.d),
    }


def cmd_select(args):
    rc = _run_config(args)
    ds = _training_data(args, _load(args))
    kcfg = rc.kernel()
    maps = FeatureMaps.build(ds.X, kcfg, rc.engine())
    G = build_output_map(ds.target, kcfg)
    path = land_select(maps, G, rc.m, rc.engine())
    selected = list(path.selected)
    report = {
        "method": "LAND",
        "task": ds.task,
        "score_mode": rc.score_mode,
        "d": ds.d,
        "n": ds.n,
        "m": rc.m,
        "b": kcfg.basis_count,
        "selected": selected,
        "names": [ds.names[k] for k in selected],
        "steps": [
            {
                "entered": s.entered_feature,
                "name": ds.names[s.entered_feature],
                "score_level": s.score_level,
                "lambda": s.lam,
            }
            for s in path.steps
        ],
        "alpha": list(path.final_alpha),
        "f": [float(path.f[k]) for k in selected],
        "dropped": list(path.dropped),
        "stop_reason": path.stop_reason,
        "metrics": _selection_metrics(ds, selected),
    }
    _emit(_dumps(report), args.out)
    if args.path:
        lines = ["step\tentered\tname\tscore_level\tlambda\tactive_set\talpha"]
        for i, s in enumerate(path.steps, start=1):
            lines.append("\t".join([
                str(i), str(s.entered_feature), ds.names[s.entered_feature],
                repr(s.score_level), repr(s.lam),
                ",".join(map(str, s.active_set)), ",".join(repr(a) for a in s.alpha),
            ]))
        atomic_write_text(args.path, "\n".join(lines) + "\n")
    return 0


def cmd_screen(args):
    rc = _run_config(args)
    ds = _training_data(args, _load(args))
    kcfg = rc.kernel()
    maps = FeatureMaps.build(ds.X, kcfg, rc.engine())
    f = relevance_pass(maps, build_output_map(ds.target, kcfg), rc.engine())
    selected = screen_mr_nhsic(f, rc.m)
    report = {
        "method": "MR-NHSIC",
        "task": ds.task,
        "score_mode": rc.score_mode,
        "d": ds.d,
        "n": ds.n,
        "m": rc.m,
        "b": kcfg.basis_count,
        "selected": selected,
        "names": [ds.names[k] for k in selected],
        "f": [float(f[k]) for k in selected],
        "metrics": _selection_metrics(ds, selected),
    }
    _emit(_dumps(report), args.out)
    return 0


def cmd_synth(args):
    ds = synth_generate(args.n, args.relevant, args.irrelevant, args.redundant,
                        args.noise, args.copy_noise, args.seed)
    write_csv(ds, args.out, header=args.header)
    return 0


def cmd_eval(args):
    ds = _load(args)
    if args.selection:
        with open(args.selection) as fh:
            selected = [int(k) for k in json.load(fh)["selected"]]
        if any(not 0 <= k < ds.d for k in selected):
            raise ValidationError("selection refers to features outside the dataset")
    elif args.features:
        selected = _parse_indices(args.features, ds.d)
    else:
        raise UsageError("eval needs --features or --selection")
    report = {"selected": selected, "names": [ds.names[k] for k in selected], "d": ds.d, "m": len(selected)}
    report["metrics"] = _selection_metrics(ds, selected)
    if args.scores:
        with open(args.scores) as fh:
            scores = [float(line) for line in fh if line.strip()]
        if len(scores) != ds.n:
            raise ValidationError(f"{len(scores)} scores for {ds.n} observations")
        labels = ds.target.values
        report["metrics"]["auc"] = auc(np.asarray(scores), labels)
    _emit(_dumps(report), args.out)
    return 0


def cmd_nhsic(args):
    rc = _run_config(args)
    ds = _load(args)
    idx = _parse_indices(args.features, ds.d)
    kcfg = rc.kernel()
    if args.oracle:
        mats = [full_normalized_kernel(ds.X[k], kcfg, kcfg.normalized) for k in idx]
        mats.append(full_normalized_kernel(ds.target, kcfg, kcfg.normalized))
        score = nhsic_exact
    else:
        maps = FeatureMaps.build(ds.X[idx], kcfg, rc.engine())
        mats = [maps.maps[i] for i in range(len(idx))]
        mats.append(build_output_map(ds.target, kcfg).G)
        score = nhsic_approx
    labels = [ds.names[k] for k in idx] + [ds.target_name]
    lines = ["\t".join([""] + labels)]
    for a, la in zip(mats, labels):
        lines.append("\t".join([la] + [repr(score(a, b)) for b in mats]))
    _emit("\n".join(lines) + "\n", args.out)
    return 0


COMMANDS = {
    "select": cmd_select,
    "screen": cmd_screen,
    "synth": cmd_synth,
    "eval": cmd_eval,
    "nhsic": cmd_nhsic,
}


def cli_main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"land: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"land: I/O error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
