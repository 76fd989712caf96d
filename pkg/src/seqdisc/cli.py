"""Command-line front end.

Exit codes: 0 success, 2 domain or capacity error, 3 certification failure,
4 SDP input infeasible.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import corelinalg as la
from .errors import CapacityError, DomainError
from .experiments import injective_experiment, injective_gram, random_experiment
from .gram import gram_structured, spectrum_crosscheck, structured_spectrum
from .optimum import GAP_TOL, PSD_TOL, optimal_sequence, optimal_single, verify_optimality
from .povmsim import simulate_collective, simulate_individual
from .sdp import INFEASIBLE_INPUT, SdpProblem, solve_primal
from .stateset import ParentSpec, window

EXIT_OK = 0
EXIT_DOMAIN = 2
EXIT_CERTIFY = 3
EXIT_INFEASIBLE = 4

SWEEP_MARGIN = 1e-6
GRID_MARGIN = 1e-3
GRID_POINTS = 9
DEFAULT_N = (2, 3, 4)
DEFAULT_K = (1, 2, 3)


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str
    N: tuple[int, ...] = DEFAULT_N
    k: tuple[int, ...] = DEFAULT_K
    s: tuple[float, ...] | None = None
    s_range: tuple[float, float, int] | None = None
    trials: int = 100_000
    seed: int = 0
    injective: bool = False
    count: int = 100
    strategy: str = "both"
    output_format: str = "json"
    output_path: str | None = None
    problem: str | None = None
    tol_psd: float = PSD_TOL
    tol_gap: float = GAP_TOL
    max_dim: int = field(default_factory=la.max_dim)

    def to_dict(self) -> dict:
        return asdict(self)


def default_s_grid(N: int, points: int = GRID_POINTS, margin: float = GRID_MARGIN) -> list[float]:
    """Evenly spaced overlaps spanning the independence window, ``margin`` in from each end."""
    lo, hi = window(N)
    return [float(x) for x in np.linspace(lo + margin, hi - margin, points)]


def s_values(config: RunConfig, N: int) -> list[float]:
    if config.s is not None:
        values = list(config.s)
    elif config.s_range is not None:
        lo, hi, steps = config.s_range
        values = [float(x) for x in np.linspace(lo, hi, steps)]
    else:
        values = default_s_grid(N)
    lo, hi = window(N)
    for s in values:
        if not lo + SWEEP_MARGIN < s < hi - SWEEP_MARGIN:
            raise CommandError(
                f"s={s} not strictly inside ({lo:.6g}, {hi:.6g}) with margin {SWEEP_MARGIN} for N={N}",
                EXIT_DOMAIN,
            )
    return values


def grid(config: RunConfig):
    for N in config.N:
        for k in config.k:
            la.check_size(N**k)
            for s in s_values(config, N):
                yield N, k, s


def cmd_optimal(config: RunConfig) -> tuple[dict, int]:
    rows = [
        {"N": N, "k": k, "s": s, "p_single": optimal_single(N, s), "p_sequence": optimal_sequence(N, k, s)}
        for N, k, s in grid(config)
    ]
    return {"rows": rows}, EXIT_OK


def cmd_certify(config: RunConfig) -> tuple[dict, int]:
    reports = [verify_optimality(N, k, s, config.tol_psd, config.tol_gap) for N, k, s in grid(config)]
    failed = [i for i, r in enumerate(reports) if not r.passed]
    payload = {
        "rows": [r.to_dict() for r in reports],
        "summary": {"points": len(reports), "failed": failed},
    }
    return payload, EXIT_CERTIFY if failed else EXIT_OK


def cmd_spectrum(config: RunConfig) -> tuple[dict, int]:
    rows, checks = [], []
    for N, k, s in grid(config):
        for e in structured_spectrum(N, k, s).entries:
            rows.append({"N": N, "k": k, "s": s, "a": e.a, "b": e.b, "value": e.value,
                         "multiplicity": e.multiplicity})
        checks.append(spectrum_crosscheck(N, k, s).to_dict())
    return {"rows": rows, "summary": {"crosscheck": checks}}, EXIT_OK


def _load_problem(path: str) -> SdpProblem:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CommandError(f"cannot read problem file {path}: {exc}", EXIT_DOMAIN) from exc
    return SdpProblem.from_dict(data)


def cmd_sdp(config: RunConfig) -> tuple[dict, int]:
    if config.problem:
        problem = _load_problem(config.problem)
        k = config.k[0] if len(config.k) == 1 else 1
        single = solve_primal(problem)
        if single.status == INFEASIBLE_INPUT:
            return {"solution": single.to_dict()}, EXIT_INFEASIBLE
        payload = {"dim": problem.dim, "solution": single.to_dict()}
        if k > 1:
            joint_problem = SdpProblem(la.kron_power(problem.gram, k), la.kron_power(problem.priors[None, :], k)[0])
            joint = solve_primal(joint_problem)
            payload.update(
                k=k,
                joint=joint.to_dict(),
                product_bound=single.value**k,
                joint_minus_product=joint.value - single.value**k,
            )
        return payload, EXIT_OK
    if len(config.N) != 1 or len(config.k) != 1:
        raise CommandError("sdp needs --problem FILE or a single --N and --k", EXIT_DOMAIN)
    N, k = config.N[0], config.k[0]
    svals = s_values(config, N) if (config.s or config.s_range) else None
    if not svals or len(svals) != 1:
        raise CommandError("sdp needs exactly one --s value", EXIT_DOMAIN)
    s = svals[0]
    gram = injective_gram(N, k, s) if config.injective else gram_structured(N, k, s)
    sol = solve_primal(SdpProblem.uniform(gram))
    if sol.status == INFEASIBLE_INPUT:
        return {"solution": sol.to_dict()}, EXIT_INFEASIBLE
    # the closed form covers the full sequence set; for the injective subset it is a reference only
    closed = optimal_sequence(N, k, s)
    payload = {
        "N": N,
        "k": k,
        "s": s,
        "injective": config.injective,
        "solution": sol.to_dict(),
        "closed_form": closed,
        "abs_error": abs(sol.value - closed),
    }
    return payload, EXIT_OK


def cmd_random_experiment(config: RunConfig) -> tuple[dict, int]:
    if len(config.N) != 1 or len(config.k) != 1:
        raise CommandError("random-experiment needs a single --N and --k", EXIT_DOMAIN)
    if config.count < 0:
        raise CommandError("--count must be >= 0", EXIT_DOMAIN)
    result = random_experiment(config.N[0], config.k[0], config.count, config.seed)
    return result, EXIT_OK


def cmd_injective_experiment(config: RunConfig) -> tuple[dict, int]:
    if len(config.N) != 1 or len(config.k) != 1 or not (config.s or config.s_range):
        raise CommandError("injective-experiment needs a single --N, --k and --s", EXIT_DOMAIN)
    N = config.N[0]
    rows = [injective_experiment(N, config.k[0], s) for s in s_values(config, N)]
    return {"rows": rows}, EXIT_OK


def cmd_simulate(config: RunConfig) -> tuple[dict, int]:
    if config.trials < 1:
        raise CommandError("--trials must be >= 1", EXIT_DOMAIN)
    if config.strategy not in ("individual", "collective", "both"):
        raise CommandError(f"unknown strategy {config.strategy!r}", EXIT_DOMAIN)
    if config.s is None and config.s_range is None:
        raise CommandError("simulate needs --s or --s-range", EXIT_DOMAIN)
    rows = []
    for N, k, s in grid(config):
        spec = ParentSpec(N, s)
        if config.strategy in ("individual", "both"):
            rows.append(simulate_individual(spec, k, config.trials, config.seed).to_dict())
        if config.strategy in ("collective", "both"):
            rows.append(simulate_collective(spec, k, config.trials, config.seed).to_dict())
    return {"rows": rows}, EXIT_OK


COMMANDS = {
    "optimal": cmd_optimal,
    "certify": cmd_certify,
    "sdp": cmd_sdp,
    "simulate": cmd_simulate,
    "random-experiment": cmd_random_experiment,
    "injective-experiment": cmd_injective_experiment,
    "spectrum": cmd_spectrum,
}
TABULAR = {"optimal", "certify", "spectrum", "simulate", "random-experiment", "injective-experiment"}
CSV_FIELDS = {"optimal": ["N", "k", "s", "p_single", "p_sequence"]}


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _s_range(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, steps = text.split(":")
        out = float(lo), float(hi), int(steps)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected lo:hi:steps, got {text!r}") from exc
    if out[2] < 1:
        raise argparse.ArgumentTypeError("steps must be >= 1")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqdisc",
        description="Optimal unambiguous discrimination of quantum state sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=_int_list, help="parent-set size(s), comma separated")
    common.add_argument("--k", type=_int_list, help="sequence length(s), comma separated")
    common.add_argument("--s", type=_float_list, help="overlap value(s), comma separated")
    common.add_argument("--s-range", type=_s_range, help="sweep lo:hi:steps (use --s-range=LO:HI:STEPS for negative LO)")
    common.add_argument("--trials", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--count", type=int, default=100, help="instances for random-experiment")
    common.add_argument("--injective", action="store_true", help="restrict to sequences without repeats")
    common.add_argument("--strategy", default="both", help="individual, collective or both")
    common.add_argument("--format", dest="output_format", choices=("json", "csv"), default="json")
    common.add_argument("--out", dest="output_path")
    common.add_argument("--problem", help="JSON file {\"gram\": [[...]], \"priors\": [...]}")
    common.add_argument("--tol-psd", type=float, default=PSD_TOL)
    common.add_argument("--tol-gap", type=float, default=GAP_TOL)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    single = args.command in ("sdp", "random-experiment", "injective-experiment", "simulate")
    N = args.N or ((3,) if single else DEFAULT_N)
    k = args.k or ((2,) if single else DEFAULT_K)
    return RunConfig(
        command=args.command,
        N=N,
        k=k,
        s=args.s,
        s_range=args.s_range,
        trials=args.trials,
        seed=args.seed,
        injective=args.injective,
        count=args.count,
        strategy=args.strategy,
        output_format=args.output_format,
        output_path=args.output_path,
        problem=args.problem,
        tol_psd=args.tol_psd,
        tol_gap=args.tol_gap,
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def render(config: RunConfig, payload: dict) -> str:
    if config.output_format == "json":
        return json.dumps(_jsonable({"config": config.to_dict(), **payload}), indent=2) + "\n"
    if config.command not in TABULAR or "rows" not in payload:
        raise CommandError(f"CSV output is not available for {config.command}", EXIT_DOMAIN)
    rows = _jsonable(payload["rows"])
    fields = CSV_FIELDS.get(config.command) or (list(rows[0]) if rows else [])
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_jsonable(config.to_dict())) + "\n")
    writer = csv.DictWriter(buf, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return buf.getvalue()


def run(config: RunConfig) -> tuple[str, int]:
    """Execute a command; returns ``(rendered output, exit code)``."""
    payload, code = COMMANDS[config.command](config)
    return render(config, payload), code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = config_from_args(args)
    try:
        text, code = run(config)
    except CommandError as exc:
        print(f"seqdisc: {exc}", file=sys.stderr)
        return exc.code
    except (DomainError, CapacityError) as exc:
        print(f"seqdisc: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    if config.output_path:
        with open(config.output_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
