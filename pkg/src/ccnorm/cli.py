"""Command-line front end: evaluation, diagnostics, moments, sweeps.

Parameters arrive as JSON ({"eta": [...]} or {"lambda": [...]}) from a
file, stdin ("-"), or an inline literal. Full K-vectors and reduced
(K-1)-vectors are both accepted; full vectors are normalized by
subtracting the last entry, with the exact e^a factor folded back into
the printed value. Results go to stdout as JSON; errors exit 1 with the
error class name on stderr; usage problems exit 2.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from typing import Optional, Sequence

from .closed_form import (cancellation_diagnostics, log_norm_const_signed,
                          norm_const_closed)
from .errors import CCNormError, DegenerateParameters
from .inductive import OrderingStrategy, norm_const_inductive
from .laplace import InversionSettings, image_for, invert
from .oracle import OracleConfig, norm_const_oracle
from .params import (EvalResult, NaturalParams, eta_to_lambda, lambda_to_eta,
                     parse_eta_array, parse_lambda_array, result_from_log)
from .repeated import MomentIndex, cc_moment, collapse_params, norm_const_repeated
from . import bench

_AUTO_FALLBACK_DIGITS = 6.0


def _read_params(spec: str) -> dict:
    if spec.lstrip().startswith("{"):
        text = spec
    elif spec == "-":
        text = sys.stdin.read()
    else:
        with open(spec, "r", encoding="utf-8") as fh:
            text = fh.read()
    obj = json.loads(text)
    if not isinstance(obj, dict):
        raise ValueError("params JSON must be an object")
    return obj


def _load_eta(spec: str) -> tuple[NaturalParams, float]:
    """(params, log_shift) from an eta or lambda params object."""
    obj = _read_params(spec)
    if "eta" in obj:
        return parse_eta_array(obj["eta"])
    if "lambda" in obj:
        return lambda_to_eta(parse_lambda_array(obj["lambda"])), 0.0
    raise ValueError('params object needs an "eta" or "lambda" key')


def _shifted(res: EvalResult, log_shift: float) -> EvalResult:
    if log_shift == 0.0:
        return res
    return result_from_log(res.log_abs + log_shift, res.sign, res.method,
                           res.precision, res.diagnostics)


def _eval_result_json(res: EvalResult) -> dict:
    lost: Optional[float] = None
    if res.diagnostics is not None:
        lost = res.diagnostics.digits_lost_estimate
    return {"value": res.value, "log_abs": res.log_abs, "sign": res.sign,
            "method": res.method, "precision_bits": res.precision_bits,
            "digits_lost": lost}


def _eval_auto(nat: NaturalParams, tie_tol: float,
               oracle_cfg: OracleConfig) -> EvalResult:
    full = nat.full()
    if len(set(full)) != len(full):
        return norm_const_repeated(collapse_params(full, tie_tol))
    try:
        res = norm_const_closed(nat, "binary64")
    except DegenerateParameters:
        return norm_const_repeated(collapse_params(full, tie_tol))
    if (res.diagnostics is not None
            and res.diagnostics.digits_lost_estimate >= _AUTO_FALLBACK_DIGITS):
        return norm_const_oracle(nat, oracle_cfg)
    return res


def _cmd_eval(args: argparse.Namespace) -> int:
    nat, shift = _load_eta(args.params)
    method = args.method
    if method in ("dehoog", "stehfest", "talbot"):
        res = invert(image_for(nat), 1.0, InversionSettings(method=method))
    elif method == "closed32":
        res = norm_const_closed(nat, "binary32")
    elif method == "closed64":
        res = norm_const_closed(nat, "binary64")
    elif method == "logsumexp":
        log_abs, sign = log_norm_const_signed(nat)
        res = result_from_log(log_abs, sign, "logsumexp", "binary64")
    elif method == "inductive":
        res = norm_const_inductive(nat)
    elif method == "oracle":
        res = norm_const_oracle(
            nat, OracleConfig(target_sig_figs=args.sig_figs or 4))
    elif method == "repeated":
        res = norm_const_repeated(collapse_params(nat.full(), args.tie_tol))
    else:  # auto
        res = _eval_auto(nat, args.tie_tol,
                         OracleConfig(target_sig_figs=args.sig_figs or 10))
    print(json.dumps(_eval_result_json(_shifted(res, shift))))
    return 0


def _cmd_diag(args: argparse.Namespace) -> int:
    nat, shift = _load_eta(args.params)
    report = cancellation_diagnostics(nat)
    if shift != 0.0:
        # restate magnitudes for the un-normalized input
        s10 = shift / math.log(10.0)
        report = dataclasses.replace(
            report,
            log10_max_abs_summand=report.log10_max_abs_summand + s10,
            log10_abs_result=report.log10_abs_result + s10)
    print(json.dumps(dataclasses.asdict(report)))
    return 0


def _parse_list(text: str) -> list[float]:
    text = text.strip()
    if text.startswith("["):
        vals = json.loads(text)
    else:
        vals = [v for v in text.replace(",", " ").split() if v]
    return [float(v) for v in vals]


def _cmd_moments(args: argparse.Namespace) -> int:
    values = _parse_list(args.values)
    orders = [int(a) for a in _parse_list(args.orders)]
    backend = {"ad": "closed_form_ad", "fd": "oracle_fd"}[args.backend]
    value = cc_moment(values, MomentIndex(tuple(orders)), backend=backend)
    print(json.dumps({"value": value, "backend": backend}))
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    kwargs = {"seed": args.seed, "k_max": args.k_max}
    if args.sigmas is not None:
        kwargs["sigmas"] = tuple(_parse_list(args.sigmas))
    if args.draws is not None:
        kwargs["draws_per_sigma"] = args.draws
    if args.sig_figs is not None:
        kwargs["sig_figs_required"] = args.sig_figs
    cfg = bench.ExperimentConfig(**kwargs)

    import os
    os.makedirs(args.out, exist_ok=True)
    target = args.target
    if target in ("fig1", "all"):
        bench.write_records_csv(bench.run_figure1(cfg),
                                os.path.join(args.out, "fig1.csv"))
    if target in ("fig2", "all"):
        records, verdicts = bench._figure2_cells(cfg)
        bench.write_records_csv(records, os.path.join(args.out, "fig2.csv"))
        bench.write_verdicts_csv(
            verdicts, os.path.join(args.out, "fig2_verdicts.csv"))
    if target in ("milestones", "all"):
        bench.write_milestones_csv(bench.digit_loss_milestones(),
                                   os.path.join(args.out, "milestones.csv"))
    return 0


def _cmd_convert(args: argparse.Namespace) -> int:
    obj = _read_params(args.params)
    if args.source == "lambda":
        if "lambda" not in obj:
            raise ValueError('convert --from lambda needs a "lambda" key')
        nat = lambda_to_eta(parse_lambda_array(obj["lambda"]))
        print(json.dumps({"eta": list(nat.eta)}))
    else:
        if "eta" not in obj:
            raise ValueError('convert --from eta needs an "eta" key')
        nat, _ = parse_eta_array(obj["eta"])
        mean = eta_to_lambda(nat)
        print(json.dumps({"lambda": list(mean.lam.coords) + [mean.lam.last]}))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="ccnorm",
        description="normalizing constants of the continuous categorical")
    sub = p.add_subparsers(dest="subcommand", required=True)

    methods = ["closed32", "closed64", "logsumexp", "inductive", "dehoog",
               "stehfest", "talbot", "oracle", "repeated", "auto"]
    pe = sub.add_parser("eval", help="compute the normalizing constant")
    pe.add_argument("--params", required=True,
                    help='JSON file, "-" for stdin, or inline {"eta": [...]}')
    pe.add_argument("--method", default="auto", choices=methods)
    pe.add_argument("--sig-figs", dest="sig_figs", type=int, default=None)
    pe.add_argument("--tie-tol", dest="tie_tol", type=float, default=0.0)
    pe.set_defaults(run=_cmd_eval)

    pd = sub.add_parser("diag", help="cancellation report for the closed form")
    pd.add_argument("--params", required=True)
    pd.set_defaults(run=_cmd_diag)

    pm = sub.add_parser("moments", help="CC moment E[prod u_i^a_i]")
    pm.add_argument("--values", required=True)
    pm.add_argument("--orders", required=True)
    pm.add_argument("--backend", default="ad", choices=["ad", "fd"])
    pm.set_defaults(run=_cmd_moments)

    pb = sub.add_parser("bench", help="accuracy sweeps, CSV output")
    pb.add_argument("target", choices=["fig1", "fig2", "milestones", "all"])
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--out", required=True)
    pb.add_argument("--k-max", dest="k_max", type=int, default=40)
    pb.add_argument("--sigmas", default=None,
                    help="comma-separated list or JSON array")
    pb.add_argument("--draws", type=int, default=None)
    pb.add_argument("--sig-figs", dest="sig_figs", type=int, default=None)
    pb.set_defaults(run=_cmd_bench)

    pc = sub.add_parser("convert", help="switch parameterizations")
    pc.add_argument("--from", dest="source", required=True,
                    choices=["lambda", "eta"])
    pc.add_argument("--params", required=True)
    pc.set_defaults(run=_cmd_convert)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.run(args)
    except CCNormError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
