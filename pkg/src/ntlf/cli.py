"""Command line entry point.

    ntlf <analyze|synthesize|verify> --config FILE [--out-dir DIR] [--seed N]
         [--sections-per-lambda K]

Exit status: 0 on success, 2 when a synthesis ends infeasible or a verified
design fails its mask, 1 on any error.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

from . import __version__
from .analysis import analyze, choose_num_sections
from .config import JobConfig, load_config
from .errors import NtlError
from .formats import write_geometry_svg, write_profile_csv, write_report_json, write_touchstone
from .objective import ConstraintReport
from .optimizer import synthesize, verify

log = logging.getLogger("ntlf")

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2


def _report_dict(report: ConstraintReport) -> dict:
    return {
        "margins": report.margins(),
        "pass": {
            "passband": report.passband_ok,
            "stopband": report.stopband_ok,
            "transition": report.transition_ok,
            "width": report.width_ok,
            "overall": report.passed,
        },
    }


def _profile_dict(profile) -> dict:
    return {"d_m": profile.d, "c": list(profile.c), "s": list(profile.s)}


def _emit(job: JobConfig, out_dir: Path, profile, sweep, summary: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    if "touchstone" in job.outputs:
        write_touchstone(sweep, out_dir / "response.s2p")
    if "csv" in job.outputs:
        write_profile_csv(profile, job.substrate, job.grid.z_samples, out_dir / "profile.csv")
    if "svg" in job.outputs:
        write_geometry_svg(profile, job.substrate, out_dir / "geometry.svg")
    if "report" in job.outputs:
        write_report_json(summary, out_dir / "report.json")


def run(job: JobConfig, out_dir: Path) -> int:
    grid = job.grid.frequency_grid(job.spec.f_max)
    m = choose_num_sections(job.spec.d, grid.f_max, job.substrate.eps_r, job.grid.sections_per_lambda)
    summary = {"tool": f"ntlf {__version__}", "mode": job.mode, "sections": m}

    if job.mode == "analyze":
        sweep = analyze(job.profile, job.substrate, grid, job.spec.z0, m)
        summary["profile"] = _profile_dict(job.profile)
        _emit(job, out_dir, job.profile, sweep, summary)
        return EXIT_OK

    if job.mode == "verify":
        report, err, sweep = verify(
            job.profile, job.spec, job.substrate, grid, m, z_samples=job.grid.z_samples
        )
        summary.update(profile=_profile_dict(job.profile), error_value=err, **_report_dict(report))
        _emit(job, out_dir, job.profile, sweep, summary)
        log.info("verify: error %.6g, margins %s", err, report.margins())
        return EXIT_OK if report.passed else EXIT_FAILED

    result = synthesize(
        job.spec,
        job.substrate,
        job.optimizer,
        grid,
        sections_per_lambda=job.grid.sections_per_lambda,
        z_samples=job.grid.z_samples,
    )
    summary.update(
        profile=_profile_dict(result.profile),
        error_value=result.error_value,
        objective_value=result.objective_value,
        feasible=result.feasible,
        evals_used=result.evals_used,
        rng_seed=job.optimizer.rng_seed,
        history=list(result.history),
        **_report_dict(result.report),
    )
    _emit(job, out_dir, result.profile, result.sweep, summary)
    if not result.feasible:
        log.warning("synthesis infeasible: %s", result.report.failures())
    return EXIT_OK if result.feasible else EXIT_FAILED


class _Parser(argparse.ArgumentParser):
    # usage errors share the generic error status; 2 means a failed design
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ntlf", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"ntlf {__version__}")
    parser.add_argument("mode", choices=("analyze", "synthesize", "verify"))
    parser.add_argument("--config", required=True, type=Path, help="JSON job file")
    parser.add_argument("--out-dir", type=Path, default=Path("."), help="directory for output files")
    parser.add_argument("--seed", type=int, help="override optimizer.rng_seed")
    parser.add_argument(
        "--sections-per-lambda", type=float, metavar="K", help="override grid.sections_per_lambda"
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        job = load_config(args.config).with_mode(args.mode)
        if args.seed is not None:
            if args.seed < 0:
                raise NtlError("--seed must be non-negative")
            job = dataclasses.replace(job, optimizer=dataclasses.replace(job.optimizer, rng_seed=args.seed))
        if args.sections_per_lambda is not None:
            if args.sections_per_lambda < 10:
                raise NtlError("--sections-per-lambda must be >= 10")
            job = dataclasses.replace(
                job, grid=dataclasses.replace(job.grid, sections_per_lambda=args.sections_per_lambda)
            )
        return run(job, args.out_dir)
    except (NtlError, OSError) as exc:
        print(f"ntlf: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
