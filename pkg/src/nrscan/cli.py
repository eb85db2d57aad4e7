"""Command line: ``nrscan {predict,scan,density,verify} --config FILE``.

Exit codes: 0 success, 2 prediction mismatch, 3 density below threshold,
4 config error, 5 unsupported configuration or refused hypothesis.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .config import ConfigError, ExperimentConfig, parse_config
from .predictor import Prediction, UnsupportedConfiguration, predict
from .scan import DensityCounter, DensityRequest, HypothesisError, ReductionRecord, ScanSummary, run_scan

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_DENSITY = 3
EXIT_CONFIG = 4
EXIT_UNSUPPORTED = 5


@dataclass
class VerifyReport:
    predicted_nr: Optional[int] = None
    computed_nr: Optional[int] = None
    empirical_gcd: Optional[int] = None
    prediction: Optional[Prediction] = None
    summary: Optional[ScanSummary] = None
    densities: list[tuple[DensityCounter, float]] = field(default_factory=list)
    violations: list[int] = field(default_factory=list)
    runtime_s: float = 0.0

    @property
    def match(self) -> bool:
        return self.predicted_nr is not None and self.predicted_nr == self.empirical_gcd

    @property
    def densities_ok(self) -> bool:
        return all(c.total and c.lower > thr for c, thr in self.densities)


def records_csv(records: Sequence[ReductionRecord], nfactors: int, ells: Sequence[int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["p", "status", *(f"ord_{i}" for i in range(1, nfactors + 1)), "ord", *(f"v_{ell}" for ell in ells)])
    blank = [""] * (nfactors + 1 + len(ells))
    for r in records:
        if r.good:
            w.writerow([r.p, "good", *r.factor_orders, r.combined_order, *(v for _, v in r.valuations)])
        else:
            w.writerow([r.p, f"skipped:{r.status}", *blank])
    return buf.getvalue()


def _prediction_lines(pred: Prediction) -> list[str]:
    lines = [f"n_R = {pred.n_r}", f"dim G_R = {pred.dimension}", f"independent = {str(pred.independent).lower()}"]
    if pred.torus is not None:
        basis = pred.torus.relation_lattice.vectors()
        lines.append("relation lattice basis = " + (" ".join("(" + ",".join(map(str, v)) + ")" for v in basis) or "0"))
        lines.append(f"torus block: n = {pred.torus.n_components}, dim = {pred.torus.dimension}")
    for b in pred.blocks:
        lines.append(f"elliptic block {b.label}: n = {b.n_components}, dim = {b.dimension} ({b.detail})")
    lines += [f"assumption: {a}" for a in pred.assumptions.describe()]
    return lines


def _summary_lines(s: ScanSummary) -> list[str]:
    lines = [
        f"range = [{s.lo}, {s.hi}], burn_in = {s.burn_in}",
        f"good primes counted = {s.good_count}, skipped = {len(s.skipped)}",
        f"running gcd = {s.running_gcd} (stable from p = {s.gcd_stabilized_at})",
    ]
    if s.skipped:
        shown = ", ".join(f"{p}:{why}" for p, why in s.skipped[:20])
        lines.append(f"skipped primes: {shown}{' ...' if len(s.skipped) > 20 else ''}")
    if s.exceptions:
        lines.append(f"pre-burn-in primes not divisible by the gcd: {', '.join(map(str, s.exceptions))}")
    for ell, h in s.histograms.items():
        lines.append(f"v_{ell} histogram: " + ", ".join(f"{v}:{c}" for v, c in h.items()))
    return lines


def _write_csv(cfg: ExperimentConfig, summary: ScanSummary, out: Optional[str]) -> None:
    path = out or cfg.out
    if path:
        text = records_csv(summary.records, len(cfg.spec.factors), cfg.ells)
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _scan(cfg: ExperimentConfig, densities: Sequence[DensityRequest] = ()) -> ScanSummary:
    lo, hi, burn_in = cfg.require_range()
    return run_scan(cfg.spec, lo, hi, burn_in, cfg.ells, cfg.threads, cfg.ec_method, densities)


def cmd_predict(cfg: ExperimentConfig, out=sys.stdout) -> VerifyReport:
    pred = predict(cfg.spec)
    print("\n".join(_prediction_lines(pred)), file=out)
    return VerifyReport(predicted_nr=pred.n_r, computed_nr=pred.n_r, prediction=pred)


def cmd_scan(cfg: ExperimentConfig, csv_out: Optional[str] = None, out=sys.stdout) -> ScanSummary:
    summary = _scan(cfg)
    _write_csv(cfg, summary, csv_out)
    print("\n".join(_summary_lines(summary)), file=out)
    return summary


def cmd_density(cfg: ExperimentConfig, csv_out: Optional[str] = None, out=sys.stdout) -> VerifyReport:
    if not cfg.densities:
        raise ConfigError("[density] declares no measurements")
    summary = _scan(cfg, cfg.densities)
    _write_csv(cfg, summary, csv_out)
    report = VerifyReport(summary=summary)
    report.densities = [(summary.density_counters[r.name], r.threshold) for r in cfg.densities]
    for c, thr in report.densities:
        print(f"{c}  threshold {thr}: {'ok' if c.lower > thr else 'BELOW'}", file=out)
    return report


def cmd_verify(cfg: ExperimentConfig, csv_out: Optional[str] = None, out=sys.stdout) -> tuple[int, VerifyReport]:
    t0 = time.perf_counter()
    if cfg.spec.is_torsion():
        raise HypothesisError("R has finite order; the statement being verified requires a point of infinite order")
    pred = predict(cfg.spec)
    summary = _scan(cfg, cfg.densities)
    _write_csv(cfg, summary, csv_out)
    report = VerifyReport(
        predicted_nr=cfg.expected_nr if cfg.expected_nr is not None else pred.n_r,
        computed_nr=pred.n_r,
        empirical_gcd=summary.running_gcd,
        prediction=pred,
        summary=summary,
        densities=[(summary.density_counters[r.name], r.threshold) for r in cfg.densities],
        violations=[r.p for r in summary.records if r.good and r.p >= summary.burn_in and r.combined_order % pred.n_r],
    )
    report.runtime_s = time.perf_counter() - t0
    lines = _prediction_lines(pred)
    if cfg.expected_nr is not None:
        lines.append(f"expected n_R (config override) = {cfg.expected_nr}")
    lines += _summary_lines(summary)
    lines.append(f"primes p >= burn_in where n_R does not divide the order: {len(report.violations)}")
    for c, thr in report.densities:
        lines.append(f"density {c}  threshold {thr}: {'ok' if c.total and c.lower > thr else 'BELOW'}")
    lines.append(f"match = {str(report.match).lower()} (predicted {report.predicted_nr}, empirical {report.empirical_gcd})")
    lines.append(f"runtime = {report.runtime_s:.2f} s")
    print("\n".join(lines), file=out)
    if not report.match:
        return EXIT_MISMATCH, report
    if not report.densities_ok:
        return EXIT_DENSITY, report
    return EXIT_OK, report


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nrscan", description="Component counts and orders of reductions of rational points.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("predict", "compute n_R from the group spec"),
        ("scan", "sweep primes and report the gcd of reduction orders"),
        ("density", "measure the configured prime densities"),
        ("verify", "compare predicted n_R with the empirical gcd, check densities"),
    ]:
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="experiment config file")
        p.add_argument("--out", help="CSV output path (overrides the config)")
        p.add_argument("--threads", type=int, help="worker processes for the sweep (overrides the config)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
        if args.threads is not None:
            if args.threads < 1:
                raise ConfigError("--threads must be at least 1")
            cfg.threads = args.threads
        if args.command == "predict":
            cmd_predict(cfg)
            return EXIT_OK
        if args.command == "scan":
            cmd_scan(cfg, args.out)
            return EXIT_OK
        if args.command == "density":
            report = cmd_density(cfg, args.out)
            return EXIT_OK if report.densities_ok else EXIT_DENSITY
        code, _ = cmd_verify(cfg, args.out)
        return code
    except HypothesisError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except UnsupportedConfiguration as exc:
        print(f"unsupported configuration: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

if __name__ == "__main__":
    sys.exit(main())
