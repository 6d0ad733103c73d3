"""Command-line front end. Every subcommand that writes a CSV also writes a JSON manifest next to
it; `replay` regenerates a CSV from its manifest and checks the checksum.

Exit status: 0 on success, 1 when `replay` finds a different checksum, 2 on any error.
"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
import argparse
from collections.abc import Callable, Sequence
import logging
import math
from pathlib import Path
import sys
import tempfile

# Package dependencies
import numpy as np

# Project dependencies
from cat_teleport.errors import CatTeleportError, InvalidParameter
from cat_teleport.feasibility import CavityParams, check_feasibility, format_report, preset
from cat_teleport.fock_core import (
    DEFAULT_POLICY,
    DEGENERATE_ALPHA,
    TruncationPolicy,
    cat_from_bloch,
    normalized_cat_coefficients,
)
from cat_teleport.jc_dynamics import (
    correction_fields,
    excitation_trace,
    fidelity_closed_form_trace,
    fidelity_trace,
    find_fmax,
    fixed_time,
)
from cat_teleport.montecarlo import CLASSICAL_BASELINE, DEFAULT_SEED, McConfig, average_fidelity
from cat_teleport.protocol import (
    Schedule,
    failure_probability,
    outcome_probabilities_simulated,
    teleport,
)
from cat_teleport.reporting import RunManifest, sha256_hex, write_report
from cat_teleport.sample_batch import sample_stream


logger = logging.getLogger(__name__)

Handler = Callable[[argparse.Namespace], int]


def _state(args: argparse.Namespace) -> tuple[complex, complex]:
    """(x, y) from the explicit coefficients if any were given, else from (θ, φ)"""
    explicit = (args.x_re, args.x_im, args.y_re, args.y_im)
    if any(value is not None for value in explicit):
        x = complex(args.x_re or 0.0, args.x_im or 0.0)
        y = complex(args.y_re or 0.0, args.y_im or 0.0)
        return normalized_cat_coefficients(args.alpha, x, y)
    return cat_from_bloch(args.alpha, args.theta, args.phi)


def _coupling(args: argparse.Namespace) -> None:
    """Reject an amplitude or coupling that leaves π/(|α| g0) undefined"""
    if abs(args.alpha) < DEGENERATE_ALPHA:
        raise InvalidParameter(f"alpha must be nonzero, got {args.alpha}")
    _check_g0(args)


def _check_g0(args: argparse.Namespace) -> None:
    if not args.g0 > 0.0:
        raise InvalidParameter(f"g0 must be > 0, got {args.g0}")


def _policy(args: argparse.Namespace) -> TruncationPolicy:
    return TruncationPolicy(epsilon=args.epsilon, n_max_cap=args.nmax_cap)


def _alpha_grid(args: argparse.Namespace) -> list[float]:
    if not 0.0 < args.alpha_min < args.alpha_max:
        raise InvalidParameter(
            f"need 0 < alpha-min < alpha-max, got {args.alpha_min} and {args.alpha_max}"
        )
    if args.points < 2:
        raise InvalidParameter(f"points must be >= 2, got {args.points}")
    return [float(alpha) for alpha in np.linspace(args.alpha_min, args.alpha_max, args.points)]


def _replayable(argv: Sequence[str]) -> list[str]:
    """`argv` without the global flags and without `--out`"""
    kept: list[str] = []
    skip = False
    for argument in argv:
        if skip:
            skip = False
        elif argument == "--out":
            skip = True
        elif not argument.startswith("--out=") and argument != "--verbose":
            kept.append(argument)
    return kept


def _write(args: argparse.Namespace, header: list[str], rows: list[list[object]]) -> None:
    parameters = {
        key: value
        for key, value in sorted(vars(args).items())
        if key not in ("handler", "argv", "out", "verbose")
    }
    manifest = write_report(
        Path(args.out),
        header,
        rows,
        command=args.command,
        arguments=_replayable(args.argv),
        parameters=parameters,
        seed=getattr(args, "seed", None),
    )
    print(f"wrote {args.out} (sha256 {manifest.checksum})")


def cmd_fig1(args: argparse.Namespace) -> int:
    """F(t) from the closed form and from number-basis evolution, with P_e(t)"""
    _coupling(args)
    if args.points < 2:
        raise InvalidParameter(f"points must be >= 2, got {args.points}")
    t_max = args.t_max if args.t_max is not None else 4.0 * fixed_time(args.alpha, args.g0)
    if not t_max > 0.0:
        raise InvalidParameter(f"t-max must be > 0, got {t_max}")
    x, y = _state(args)
    times = np.linspace(0.0, t_max, args.points)
    field, target = correction_fields(args.alpha, x, y, _policy(args))
    closed = fidelity_closed_form_trace(args.alpha, x, y, args.g0, times)
    numeric = fidelity_trace(field, target, args.g0, times)
    excited = excitation_trace(field, args.g0, times)
    rows = [
        [float(t), float(f_closed), float(f_numeric), float(p_e)]
        for t, f_closed, f_numeric, p_e in zip(times, closed, numeric, excited)
    ]
    _write(args, ["t", "F_closed", "F_numeric", "P_e"], rows)
    return 0


def cmd_fig2(args: argparse.Namespace) -> int:
    """Fixed-time and best-time fidelity for even and odd cats against |α|"""
    _check_g0(args)
    policy = _policy(args)
    rows: list[list[object]] = []
    for alpha in _alpha_grid(args):
        values = []
        for theta in (math.pi, 0.0):  # even, odd
            x, y = cat_from_bloch(alpha, theta, 0.0)
            field, target = correction_fields(alpha, x, y, policy)
            fixed = float(fidelity_trace(field, target, args.g0, [fixed_time(alpha, args.g0)])[0])
            best = find_fmax(alpha, x, y, args.g0, policy=policy).f_max
            values.append((fixed, best))
        (even_fixed, even_max), (odd_fixed, odd_max) = values
        rows.append([alpha, even_fixed, odd_fixed, even_max, odd_max])
    _write(args, ["alpha", "F_even_fixed_t", "F_odd_fixed_t", "F_even_max", "F_odd_max"], rows)
    return 0


def cmd_fig3(args: argparse.Namespace) -> int:
    """Monte Carlo average fidelity against |α| for both interaction-time schedules"""
    if args.samples < 100:
        raise InvalidParameter(f"samples must be >= 100, got {args.samples}")
    rows: list[list[object]] = []
    for alpha in _alpha_grid(args):
        results = {
            schedule: average_fidelity(
                McConfig(
                    n_samples=args.samples,
                    seed=args.seed,
                    schedule=schedule,
                    alpha=alpha,
                    g0=args.g0,
                    workers=args.workers,
                    policy=_policy(args),
                )
            )
            for schedule in (Schedule.ORACLE, Schedule.BLIND)
        }
        best, fixed = results[Schedule.ORACLE], results[Schedule.BLIND]
        rows.append(
            [alpha, best.f_ave, fixed.f_ave, best.std_err, fixed.std_err, CLASSICAL_BASELINE]
        )
    header = ["alpha", "f_ave_max", "f_ave_fixed_t", "std_err", "std_err_fixed_t", "baseline"]
    _write(args, header, rows)
    return 0


def cmd_pfail(args: argparse.Namespace) -> int:
    """Failure probability in closed form and from photon-count enumeration"""
    policy = _policy(args)
    rows: list[list[object]] = []
    for alpha in _alpha_grid(args):
        x, y = cat_from_bloch(alpha, args.theta, args.phi)
        closed = float(failure_probability(alpha, x, y))
        simulated = outcome_probabilities_simulated(alpha, x, y, policy).probabilities.p5
        rows.append([alpha, closed, simulated])
    _write(args, ["alpha", "p_fail_closed", "p_fail_simulated"], rows)
    return 0


def cmd_teleport(args: argparse.Namespace) -> int:
    """All five outcomes for one input, plus one outcome drawn with `--seed`"""
    _coupling(args)
    generator = sample_stream(args.seed, 0)
    x, y = _state(args)
    schedule = Schedule[args.schedule.upper()]
    reports = teleport(args.alpha, x, y, args.g0, schedule, _policy(args), args.heralded)
    header = ["outcome", "n_e", "n_f", "probability", "correction", "fidelity", "t_used"]
    rows: list[list[object]] = [
        [
            report.outcome.tag.name,
            report.outcome.n_e,
            report.outcome.n_f,
            report.probability,
            report.correction.name,
            report.fidelity,
            report.t_used,
        ]
        for report in reports
    ]
    if args.heralded:
        header += ["p_success", "heralded_fidelity"]
        for row, report in zip(rows, reports):
            row.extend(report.heralded if report.heralded is not None else ["", ""])

    print(f"|α| = {abs(args.alpha):.6g}, x = {x:.6g}, y = {y:.6g}, schedule = {schedule.name}")
    title = f"{'outcome':<10} {'counts':>8} {'probability':>14} {'correction':>15} {'fidelity':>14}"
    print(title + (f" {'p_success':>14} {'heralded':>14}" if args.heralded else ""))
    for report in reports:
        counts = f"({report.outcome.n_e},{report.outcome.n_f})"
        line = (
            f"{report.outcome.tag.name:<10} {counts:>8} {report.probability:>14.10f} "
            f"{report.correction.name:>15} {report.fidelity:>14.10f}"
        )
        if report.heralded is not None:
            line += f" {report.heralded.success_probability:>14.10f}"
            line += f" {report.heralded.fidelity:>14.10f}"
        print(line)

    probabilities = np.array([report.probability for report in reports])
    drawn = reports[int(generator.choice(len(reports), p=probabilities / probabilities.sum()))]
    print(f"sampled outcome: {drawn.outcome.tag.name}, fidelity {drawn.fidelity:.10f}")

    if args.out is not None:
        _write(args, header, rows)
    return 0


def cmd_feasibility(args: argparse.Namespace) -> int:
    """Check the dissipation inequalities for a preset or explicit rates"""
    if args.preset is not None:
        params = preset(args.preset, nbar=args.nbar, ratio_threshold=args.threshold)
    else:
        if None in (args.g0, args.gamma, args.kappa):
            raise InvalidParameter("give --preset or all of --g0, --gamma and --kappa")
        params = CavityParams(
            g0=args.g0,
            gamma=args.gamma,
            kappa=args.kappa,
            nbar=9.0 if args.nbar is None else args.nbar,
            ratio_threshold=10.0 if args.threshold is None else args.threshold,
        )
    print(format_report(check_feasibility(params)))
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    """Re-run the command recorded in a manifest and compare checksums"""
    manifest = RunManifest.load(Path(args.manifest))
    with tempfile.TemporaryDirectory() as directory:
        out = Path(directory) / "replay.csv"
        status = main([*manifest.arguments, "--out", str(out)])
        if status != 0:
            return status
        checksum = sha256_hex(out.read_bytes())
    if checksum == manifest.checksum:
        print(f"checksum reproduced: {checksum}")
        return 0
    print(f"checksum mismatch: expected {manifest.checksum}, got {checksum}")
    return 1


def _state_flags() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--alpha", type=float, default=5.0, help="coherent amplitude |α|")
    parser.add_argument("--theta", type=float, default=math.pi, help="Bloch polar angle")
    parser.add_argument("--phi", type=float, default=0.0, help="Bloch azimuth")
    for name in ("--x-re", "--x-im", "--y-re", "--y-im"):
        parser.add_argument(name, type=float, default=None)
    return parser


def _numeric_flags() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--epsilon", type=float, default=DEFAULT_POLICY.epsilon)
    parser.add_argument("--nmax-cap", type=int, default=DEFAULT_POLICY.n_max_cap)
    return parser


def _grid_flags(alpha_min: float, alpha_max: float, points: int) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--alpha-min", type=float, default=alpha_min)
    parser.add_argument("--alpha-max", type=float, default=alpha_max)
    parser.add_argument("--points", type=int, default=points)
    return parser


def _out_flag(required: bool = True) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--out", required=required, help="CSV output path")
    return parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cat-teleport",
        description="Teleportation of superposed coherent states: figures, scenarios and checks.",
    )
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)
    g0 = argparse.ArgumentParser(add_help=False)
    g0.add_argument("--g0", type=float, default=1.0, help="coupling; 1 means times are g0·t")
    samples = argparse.ArgumentParser(add_help=False)
    samples.add_argument("--samples", type=int, default=10_000)
    samples.add_argument("--seed", type=int, default=DEFAULT_SEED)
    samples.add_argument("--workers", type=int, default=1)

    def add(
        name: str, handler: Handler, *parents: argparse.ArgumentParser
    ) -> argparse.ArgumentParser:
        command = commands.add_parser(name, parents=list(parents), help=handler.__doc__)
        command.set_defaults(handler=handler)
        return command

    fig1 = add("fig1", cmd_fig1, _state_flags(), g0, _numeric_flags(), _out_flag())
    fig1.add_argument("--t-max", type=float, default=None)
    fig1.add_argument("--points", type=int, default=400)
    add("fig2", cmd_fig2, _grid_flags(1.0, 5.0, 17), g0, _numeric_flags(), _out_flag())
    add("fig3", cmd_fig3, _grid_flags(0.5, 5.0, 19), g0, samples, _numeric_flags(), _out_flag())
    pfail = add("pfail", cmd_pfail, _grid_flags(0.5, 3.0, 11), _numeric_flags(), _out_flag())
    pfail.add_argument("--theta", type=float, default=math.pi)
    pfail.add_argument("--phi", type=float, default=0.0)
    single = add("teleport", cmd_teleport, _state_flags(), g0, _numeric_flags(), _out_flag(False))
    single.add_argument("--schedule", choices=["blind", "oracle"], default="blind")
    single.add_argument("--seed", type=int, default=DEFAULT_SEED)
    single.add_argument(
        "--heralded", action="store_true", help="also report the atom-heralded fidelity"
    )
    feasibility = add("feasibility", cmd_feasibility)
    feasibility.add_argument("--preset", default=None, help="rydberg or cesium")
    feasibility.add_argument("--g0", type=float, default=None, help="rad/s")
    feasibility.add_argument("--gamma", type=float, default=None, help="rad/s")
    feasibility.add_argument("--kappa", type=float, default=None, help="rad/s")
    feasibility.add_argument("--nbar", type=float, default=None)
    feasibility.add_argument("--threshold", type=float, default=None)
    replay = add("replay", cmd_replay)
    replay.add_argument("--manifest", required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    args.argv = argv
    logging.basicConfig(
        handlers=[logging.StreamHandler()], level=logging.DEBUG if args.verbose else logging.WARNING
    )
    try:
        return args.handler(args)
    except (CatTeleportError, OSError) as error:
        print(f"error: {error}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
