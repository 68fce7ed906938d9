"""Deterministic accuracy sweeps emitting CSV.

Two experiments: a scaling study (per-K cancellation gap under standard
normal draws) and a method-vs-sigma frontier study (highest K at which
each method still matches the oracle). Sampling uses counter-based
Philox streams keyed per cell, so serial and parallel runs, or reruns on
another platform, produce byte-identical files.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ._sigfig import agree_sig, digits_agreeing
from .closed_form import norm_const_closed, region_of
from .errors import CCNormError, PrecisionExhausted
from .laplace import InversionSettings, image_for, invert
from .oracle import OracleConfig, norm_const_oracle
from .params import NaturalParams

_LOG10_2 = math.log10(2.0)
_ALL_METHODS = ("closed_binary32", "closed_binary64", "dehoog", "stehfest")
_CSV_COLUMNS = ("sigma", "draw_index", "method", "highest_k", "K",
                "log10_abs_C", "log10_max_summand", "region", "flag")


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    sigmas: Tuple[float, ...] = tuple(
        float(s) for s in np.logspace(-2.0, 2.0, 13))
    k_max: int = 40
    draws_per_sigma: int = 10
    methods: Tuple[str, ...] = _ALL_METHODS
    sig_figs_required: int = 3

    def __post_init__(self):
        if not (0 <= self.seed < 2 ** 64):
            raise ValueError("seed must fit in 64 bits")
        if self.k_max < 3:
            raise ValueError("k_max must be >= 3")
        if self.draws_per_sigma < 1:
            raise ValueError("draws_per_sigma must be >= 1")
        if not self.sigmas or any(s <= 0 for s in self.sigmas):
            raise ValueError("sigmas must be positive")
        unknown = set(self.methods) - set(_ALL_METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if self.sig_figs_required < 1:
            raise ValueError("sig_figs_required must be >= 1")


@dataclass(frozen=True)
class ExperimentRecord:
    """One CSV row; frontier rows and scaling rows fill different fields."""
    sigma: Optional[float] = None
    draw_index: Optional[int] = None
    method: Optional[str] = None
    highest_k: Optional[int] = None
    K: Optional[int] = None
    log10_abs_C: Optional[float] = None
    log10_max_summand: Optional[float] = None
    region: Optional[str] = None
    flag: Optional[str] = None


@dataclass(frozen=True)
class VerdictRecord:
    """Raw per-K agreement underlying a frontier, for recomputing it
    under a different frontier definition."""
    sigma: float
    draw_index: int
    method: str
    K: int
    agree: int


@dataclass(frozen=True)
class MilestoneRow:
    K: int
    log10_abs_C: float
    log10_max_summand: float
    digits_lost: float
    digits_correct_binary32: float
    digits_correct_binary64: float


def _cell_rng(seed: int, major: int, draw: int) -> np.random.Generator:
    # one Philox stream per cell: parallel order cannot change the draws
    key = (seed << 64) | (major << 32) | draw
    return np.random.Generator(np.random.Philox(key=key))


def run_figure1(cfg: ExperimentConfig) -> List[ExperimentRecord]:
    """Scaling study: eta_i ~ N(0,1), oracle magnitude vs largest binary64
    summand, region by the 8/16 order-gap rule."""
    oracle_cfg = OracleConfig(target_sig_figs=6)
    records: List[ExperimentRecord] = []
    for k_dim in range(3, cfg.k_max + 1):
        for draw in range(cfg.draws_per_sigma):
            rng = _cell_rng(cfg.seed, k_dim, draw)
            nat = NaturalParams(tuple(rng.standard_normal(k_dim - 1)))
            res64 = norm_const_closed(nat, "binary64")
            log10_max = res64.diagnostics.log10_max_abs_summand
            try:
                oracle = norm_const_oracle(nat, oracle_cfg)
            except PrecisionExhausted:
                records.append(ExperimentRecord(
                    sigma=1.0, draw_index=draw, method="closed_binary64",
                    K=k_dim, log10_max_summand=log10_max,
                    flag="precision_exhausted"))
                continue
            log10_c = oracle.log_abs / math.log(10.0)
            records.append(ExperimentRecord(
                sigma=1.0, draw_index=draw, method="closed_binary64",
                K=k_dim, log10_abs_C=log10_c, log10_max_summand=log10_max,
                region=region_of(log10_max - log10_c)))
    return records


def _eval_method(method: str, nat: NaturalParams) -> float:
    if method == "closed_binary32":
        return norm_const_closed(nat, "binary32").value
    if method == "closed_binary64":
        return norm_const_closed(nat, "binary64").value
    if method == "dehoog":
        settings = InversionSettings(method="dehoog")
    elif method == "stehfest":
        settings = InversionSettings(method="stehfest")
    else:
        raise ValueError(f"unknown method {method!r}")
    # c(1) = C(eta): evaluate the inverse transform at t = 1
    return invert(image_for(nat), 1.0, settings).value


def _figure2_cells(cfg: ExperimentConfig) -> tuple[List[ExperimentRecord],
                                                   List[VerdictRecord]]:
    oracle_cfg = OracleConfig(target_sig_figs=cfg.sig_figs_required + 1)
    records: List[ExperimentRecord] = []
    verdicts: List[VerdictRecord] = []
    for s_idx, sigma in enumerate(cfg.sigmas):
        for draw in range(cfg.draws_per_sigma):
            rng = _cell_rng(cfg.seed, s_idx, draw)
            eta_all = rng.standard_normal(cfg.k_max - 1) * sigma
            agree: Dict[str, List[bool]] = {m: [] for m in cfg.methods}
            for k_dim in range(3, cfg.k_max + 1):
                nat = NaturalParams(tuple(eta_all[:k_dim - 1]))
                try:
                    ref = norm_const_oracle(nat, oracle_cfg).value
                except PrecisionExhausted:
                    ref = None
                for m in cfg.methods:
                    ok = False
                    if ref is not None:
                        try:
                            ok = agree_sig(_eval_method(m, nat), ref,
                                           cfg.sig_figs_required)
                        except (CCNormError, ZeroDivisionError,
                                OverflowError):
                            ok = False
                    agree[m].append(ok)
                    verdicts.append(VerdictRecord(
                        sigma=sigma, draw_index=draw, method=m, K=k_dim,
                        agree=int(ok)))
            for m in cfg.methods:
                # first failure minus one; all-pass means the scan ceiling
                highest = cfg.k_max
                for k_dim, ok in enumerate(agree[m], start=3):
                    if not ok:
                        highest = k_dim - 1
                        break
                records.append(ExperimentRecord(
                    sigma=sigma, draw_index=draw, method=m,
                    highest_k=highest))
    return records, verdicts


def run_figure2(cfg: ExperimentConfig) -> List[ExperimentRecord]:
    """Frontier study: per (sigma, draw, method), the largest K whose whole
    prefix 3..K matched the oracle to sig_figs_required figures."""
    return _figure2_cells(cfg)[0]


def digit_loss_milestones(k_stop: int = 56) -> List[MilestoneRow]:
    """Digit loss along eta = (1, 2, ..., K-1) for K = 3..k_stop.

    digits_lost is the order gap log10(max summand) - log10(C); a format
    is out of digits once the gap reaches its decimal budget (24 and 53
    bits times log10(2)). The crossing rows are checked against the
    windows [22, 28] and [46, 54] before returning.
    """
    oracle_cfg = OracleConfig(target_sig_figs=17)
    rows: List[MilestoneRow] = []
    fail32 = fail64 = None
    for k_dim in range(3, k_stop + 1):
        nat = NaturalParams(tuple(float(i) for i in range(1, k_dim)))
        ref = norm_const_oracle(nat, oracle_cfg)
        res32 = norm_const_closed(nat, "binary32")
        res64 = norm_const_closed(nat, "binary64")
        log10_c = ref.log_abs / math.log(10.0)
        log10_max = res64.diagnostics.log10_max_abs_summand
        lost = log10_max - log10_c
        rows.append(MilestoneRow(
            K=k_dim, log10_abs_C=log10_c, log10_max_summand=log10_max,
            digits_lost=lost,
            digits_correct_binary32=digits_agreeing(res32.value, ref.value),
            digits_correct_binary64=digits_agreeing(res64.value, ref.value)))
        if fail32 is None and lost >= 24 * _LOG10_2:
            fail32 = k_dim
        if fail64 is None and lost >= 53 * _LOG10_2:
            fail64 = k_dim
    if fail32 is None or not (22 <= fail32 <= 28):
        raise AssertionError(f"binary32 digit budget crossed at K={fail32}, "
                             "expected within [22, 28]")
    if fail64 is None or not (46 <= fail64 <= 54):
        raise AssertionError(f"binary64 digit budget crossed at K={fail64}, "
                             "expected within [46, 54]")
    return rows


# --- CSV layer ----------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.9g}"
    return str(v)


def _write_rows(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_records_csv(records: Sequence[ExperimentRecord], path: str) -> None:
    _write_rows(path, _CSV_COLUMNS,
                [[getattr(r, c) for c in _CSV_COLUMNS] for r in records])


def write_verdicts_csv(verdicts: Sequence[VerdictRecord], path: str) -> None:
    cols = ("sigma", "draw_index", "method", "K", "agree")
    _write_rows(path, cols, [[getattr(v, c) for c in cols] for v in verdicts])


def write_milestones_csv(rows: Sequence[MilestoneRow], path: str) -> None:
    cols = ("K", "log10_abs_C", "log10_max_summand", "digits_lost",
            "digits_correct_binary32", "digits_correct_binary64")
    _write_rows(path, cols, [[getattr(r, c) for c in cols] for r in rows])


def run_all(cfg: ExperimentConfig, out_dir: str) -> Dict[str, str]:
    """Run both sweeps plus the milestone table; write the four CSVs."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {name: os.path.join(out_dir, name + ".csv")
             for name in ("fig1", "fig2", "fig2_verdicts", "milestones")}
    write_records_csv(run_figure1(cfg), paths["fig1"])
    records, verdicts = _figure2_cells(cfg)
    write_records_csv(records, paths["fig2"])
    write_verdicts_csv(verdicts, paths["fig2_verdicts"])
    write_milestones_csv(digit_loss_milestones(), paths["milestones"])
    return paths
