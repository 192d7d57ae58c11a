import argparse
import csv
import io
import json
import sys
import traceback
from dataclasses import dataclass
from typing import Callable

import numpy as np

from app import config
from app.criteria import (
    absolute_separability_value,
    absolutely_separable_2q,
    decide_separability,
    kz_ball_member,
    kz_radius,
    nearest_separable,
    optimal_witness,
    ppt_check,
    pt_spectrum,
    witness_eval,
)
from app.factorization import (
    Factorization,
    closed_form_tailor_unitary,
    schmidt_coefficients_in,
    tailor,
    tailored_generators,
    tps_report,
)
from app.geometry import (
    CVector,
    REGION_ORDER,
    classify,
    eigenvalues_of_c,
    region_counts,
    sample_region,
)
from app.linalg import ConvergenceError, hs_distance, purity
from app.paper_examples import run_paper_examples
from app.report_export import build_report_pdf
from app.sampling import random_vector
from app.state_files import (
    dumps,
    encode_matrix,
    encode_vector,
    factorization_doc,
    read_pure_file,
    read_state_file,
)
from app.states import DensityMatrix, PureState, is_pure, spectrum, tracial
from app.teleport import resource_by_name, resource_from_state, run_protocol

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_NOT_CONVERGED = 3

_NAMED_QUBITS = {
    "up": [1, 0],
    "down": [0, 1],
    "plus": [2 ** -0.5, 2 ** -0.5],
    "minus": [2 ** -0.5, -(2 ** -0.5)],
}


@dataclass(frozen=True)
class RunConfig:
    seed: int
    tolerances: config.Tolerances
    output_format: str
    debug: bool = False

    @property
    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


@dataclass
class Output:
    body: str | bytes
    exit_code: int = EXIT_OK


def _stderr(message: str):
    print(message, file=sys.stderr)


def _logger(run: RunConfig) -> Callable[[str], None] | None:
    return _stderr if run.debug else None


def _announce_seed(run: RunConfig):
    _stderr(f"[run] seed={run.seed}")


def _density_from(path: str) -> tuple[DensityMatrix, str | None]:
    state_file = read_state_file(path)
    return state_file.to_density(), state_file.label


def _parse_numbers(text: str) -> list[complex]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if not parts:
        raise ValueError(f"Expected comma-separated numbers, got {text!r}")
    try:
        return [complex(p) for p in parts]
    except ValueError:
        raise ValueError(f"Expected comma-separated numbers, got {text!r}")


def _real_if_possible(values: list[complex]):
    if all(abs(v.imag) == 0.0 for v in values):
        return [v.real for v in values]
    return values


def _summary_lines(doc: dict, prefix: str = "") -> list[str]:
    lines = []
    for key, value in doc.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            lines.extend(_summary_lines(value, f"{name}."))
        elif isinstance(value, list) and value and isinstance(value[0], list):
            continue  # encoded vectors and matrices are drawn separately
        else:
            lines.append(f"{name}: {json.dumps(value)}")
    return lines


def _render(run: RunConfig, doc, title: str, matrices: dict | None = None) -> str | bytes:
    if run.output_format == "pdf":
        plain = json.loads(dumps(doc))
        return build_report_pdf(
            {"title": title, "sections": [{"heading": "Summary", "lines": _summary_lines(plain), "matrices": matrices or {}}]}
        )
    return dumps(doc)


def cmd_analyze(args, run: RunConfig) -> Output:
    rho, label = _density_from(args.input)
    d1, d2 = rho.dims
    is_ppt, min_pt = ppt_check(rho)
    pt = pt_spectrum(rho)
    verdict = decide_separability(rho)
    distance = hs_distance(rho.matrix, tracial(d1, d2).matrix)
    report = {
        "label": label,
        "dims": [d1, d2],
        "trace": float(np.trace(rho.matrix).real),
        "spectrum": spectrum(rho),
        "purity": purity(rho.matrix),
        "pure": is_pure(rho),
        "ppt": {
            "is_ppt": is_ppt,
            "min_eigenvalue": min_pt,
            "pt_spectrum": pt.eigenvalues,
        },
        "verdict": verdict.status,
        "kz": {
            "member": kz_ball_member(rho),
            "radius": kz_radius(rho.dim),
            "distance_to_tracial": distance,
        },
        "hs_distance_to_tracial": distance,
    }
    if not is_ppt:
        report["ppt"]["negative_eigenvector"] = encode_vector(pt.eigenvectors[:, -1])
    if rho.dims == (2, 2):
        report["absolute_separability"] = {
            "value": absolute_separability_value(rho),
            "holds": absolutely_separable_2q(rho),
        }
    return Output(_render(run, report, f"State analysis: {label or args.input}", {"rho": rho.matrix}))


def cmd_tailor(args, run: RunConfig) -> Output:
    psi = read_pure_file(args.input)
    lambdas = _real_if_possible(_parse_numbers(args.lambdas))
    if args.unitary == "closed-form":
        if (args.k, args.l) != (2, 2) or any(isinstance(v, complex) for v in lambdas):
            raise ValueError("--unitary closed-form needs k = l = 2 and two real coefficients")
        factorization = Factorization(closed_form_tailor_unitary(*lambdas), (2, 2))
        gens_a, gens_b = tailored_generators(factorization)
    else:
        factorization, gens_a, gens_b = tailor(psi, args.k, args.l, lambdas, on_log=_logger(run))
    report = tps_report(gens_a, gens_b)
    coeffs = schmidt_coefficients_in(psi, factorization)
    target = np.sort(np.abs(np.asarray(lambdas, dtype=complex)))[::-1]
    doc = factorization_doc(factorization, gens_a, gens_b, report=report, schmidt=coeffs)
    doc["checks"]["schmidt_match"] = bool(np.max(np.abs(coeffs - target)) <= 1e-9)
    return Output(_render(run, doc, "Tailored factorization"))


def cmd_witness(args, run: RunConfig) -> Output:
    rho, label = _density_from(args.input)
    _announce_seed(run)
    result = nearest_separable(rho, rng=run.rng, on_log=_logger(run))
    if result.distance <= run.tolerances.density:
        doc = {
            "label": label,
            "status": "separable",
            "message": "no witness: state separable (distance 0)",
            "distance": result.distance,
        }
        return Output(_render(run, doc, "Witness search"))
    w = optimal_witness(rho, result.rho0)
    doc = {
        "label": label,
        "verdict": decide_separability(rho).status,
        "distance": result.distance,
        "iterations": result.iterations,
        "converged": result.converged,
        "gap": result.gap,
        "expectation_input": witness_eval(rho, w),
        "expectation_nearest": witness_eval(result.rho0, w),
        "nearest_separable": encode_matrix(result.rho0.matrix),
        "witness": encode_matrix(w.e),
    }
    body = _render(run, doc, "Witness search", {"E": w.e, "rho0": result.rho0.matrix})
    return Output(body, EXIT_OK if result.converged else EXIT_NOT_CONVERGED)


def _input_qubit(text: str, d: int, rng: np.random.Generator) -> PureState:
    if text == "random":
        return PureState(random_vector(d, rng), (d, 1))
    if text in _NAMED_QUBITS:
        amplitudes = np.array(_NAMED_QUBITS[text] + [0] * (d - 2), dtype=complex)
    else:
        amplitudes = np.array(_parse_numbers(text), dtype=complex)
    return PureState(amplitudes, (d, 1))


def cmd_teleport(args, run: RunConfig) -> Output:
    if args.resource_file:
        resource = resource_from_state(read_pure_file(args.resource_file))
    else:
        resource = resource_by_name(args.resource, args.d)
    d = resource.d
    randomized = args.input_state == "random" or args.outcome == "random"
    if randomized:
        _announce_seed(run)
    rng = run.rng
    psi = _input_qubit(args.input_state, d, rng)
    if args.outcome == "all":
        outcomes = list(range(d * d))
    elif args.outcome == "random":
        outcomes = ["random"]
    else:
        outcomes = [int(args.outcome)]

    traces = []
    for outcome in outcomes:
        trace = run_protocol(psi, resource, outcome, rng=rng)
        traces.append(
            {
                "outcome": trace.outcome.outcome,
                "bits": trace.outcome.as_bits(),
                "probability": trace.outcome_probability,
                "bob_before": encode_vector(trace.bob_state_before.amplitudes),
                "correction": encode_matrix(trace.correction),
                "bob_after": encode_vector(trace.bob_state_after.amplitudes),
                "fidelity": trace.fidelity,
            }
        )
    doc = {
        "resource": args.resource_file or args.resource,
        "d": d,
        "input": encode_vector(psi.amplitudes),
        "traces": traces,
    }
    return Output(_render(run, doc, "Teleportation"))


def cmd_geometry(args, run: RunConfig) -> Output:
    if args.point:
        c = CVector.parse(args.point)
        doc = {
            "c": c.c,
            "label": classify(c),
            "eigenvalues": eigenvalues_of_c(c),
        }
        return Output(_render(run, doc, "Bell-diagonal point"))

    if args.random:
        _announce_seed(run)
    samples = list(
        sample_region(args.resolution, seed=run.seed if args.random else None, on_log=_logger(run))
    )
    counts = region_counts(samples)
    _stderr("[geometry] counts " + " ".join(f"{label.value}={counts[label]}" for label in REGION_ORDER))

    buffer = io.StringIO()
    if run.output_format == "csv":
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["cx", "cy", "cz", "label"])
        for c, label in samples:
            writer.writerow([repr(float(c[0])), repr(float(c[1])), repr(float(c[2])), label.value])
    else:
        for c, label in samples:
            buffer.write(
                json.dumps({"cx": float(c[0]), "cy": float(c[1]), "cz": float(c[2]), "label": label.value})
                + "\n"
            )
    return Output(buffer.getvalue())


def cmd_paper_examples(args, run: RunConfig) -> Output:
    results = run_paper_examples(on_log=_logger(run))
    failed = sum(1 for r in results if not r.passed)
    code = EXIT_OK if failed == 0 else EXIT_FAILED
    if run.output_format in ("json", "pdf"):
        doc = {
            "passed": len(results) - failed,
            "failed": failed,
            "checks": [
                {"name": r.name, "result": r.label, "expected": r.expected, "actual": r.actual, "error": r.error}
                for r in results
            ],
        }
        if run.output_format == "pdf":
            report = {
                "title": "Worked examples",
                "sections": [
                    {
                        "heading": f"{len(results) - failed} passed, {failed} failed",
                        "lines": [f"{r.label}  {r.name}  (error {r.error:.2e})" for r in results],
                    }
                ],
            }
            return Output(build_report_pdf(report), code)
        return Output(dumps(doc), code)
    lines = [f"{r.label} {r.name}" for r in results]
    lines.append(f"[examples] passed={len(results) - failed} failed={failed}")
    return Output("\n".join(lines) + "\n", code)


COMMANDS = {
    "analyze": (cmd_analyze, "json", ("json", "pdf")),
    "tailor": (cmd_tailor, "json", ("json",)),
    "witness": (cmd_witness, "json", ("json", "pdf")),
    "teleport": (cmd_teleport, "json", ("json",)),
    "geometry": (cmd_geometry, "csv", ("csv", "json")),
    "paper-examples": (cmd_paper_examples, "text", ("text", "json", "pdf")),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="Write the result to this path instead of stdout")
    common.add_argument("--format", dest="output_format", choices=["json", "csv", "pdf", "text"])
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (default {config.DEFAULT_SEED})")
    common.add_argument(
        "--tol-override",
        action="append",
        default=[],
        metavar="NAME=VALUE",
        help="Override one tolerance; repeatable",
    )
    common.add_argument("--debug", action="store_true", help="Log progress lines to stderr")

    parser = argparse.ArgumentParser(
        prog="python -m app.main",
        description="Factorization-dependent entanglement toolkit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="Run every criterion on a state file")
    p.add_argument("--input", required=True)

    p = sub.add_parser("tailor", parents=[common], help="Build observables giving a state chosen Schmidt coefficients")
    p.add_argument("--input", required=True, help="Pure-state JSON file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--lambdas", required=True, help="Comma-separated coefficients, e.g. 0.8,0.6")
    p.add_argument("--unitary", choices=["closed-form"], default=None, help="Use the closed-form 4x4 unitary")

    p = sub.add_parser("witness", parents=[common], help="Nearest separable state and optimal witness")
    p.add_argument("--input", required=True)

    p = sub.add_parser("teleport", parents=[common], help="Simulate teleportation")
    p.add_argument("--input-state", default="random", help="up, down, plus, minus, random or a,b,...")
    p.add_argument("--resource", default="psi-", help="Bell label (phi+, phi-, psi+, psi-) or omega")
    p.add_argument("--d", type=int, default=2, help="Level count for the omega resource")
    p.add_argument("--resource-file", default=None, help="Pure-state JSON file used as the resource")
    p.add_argument("--outcome", default="all", help="all, random or an outcome index")

    p = sub.add_parser("geometry", parents=[common], help="Classify Bell-diagonal states")
    p.add_argument("--resolution", type=int, default=21)
    p.add_argument("--point", default=None, help="Single point cx,cy,cz")
    p.add_argument("--random", action="store_true", help="Sample uniformly instead of on the grid")

    sub.add_parser("paper-examples", parents=[common], help="Run the worked-example golden checks")
    return parser


def _write(body: str | bytes, path: str | None):
    if path:
        mode = "wb" if isinstance(body, bytes) else "w"
        encoding = None if isinstance(body, bytes) else "utf-8"
        with open(path, mode, encoding=encoding) as f:
            f.write(body)
        return
    if isinstance(body, bytes):
        sys.stdout.buffer.write(body)
        sys.stdout.flush()
    else:
        sys.stdout.write(body)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler, default_format, formats = COMMANDS[args.command]
    output_format = args.output_format or default_format
    if output_format not in formats:
        _stderr(f"[error] {args.command} supports --format {', '.join(formats)}")
        return EXIT_INVALID_INPUT

    previous = config.current_tolerances()
    try:
        overrides = dict(config.parse_override(text) for text in args.tol_override)
        tolerances = config.with_overrides(previous, overrides)
        config.set_tolerances(tolerances)
        run = RunConfig(
            seed=args.seed if args.seed is not None else config.DEFAULT_SEED,
            tolerances=tolerances,
            output_format=output_format,
            debug=args.debug,
        )
        result = handler(args, run)
        _write(result.body, args.output)
        return result.exit_code
    except ConvergenceError as e:
        _stderr(f"[error] {e}")
        return EXIT_NOT_CONVERGED
    except (ValueError, OSError) as e:
        _stderr(f"[error] {e}")
        return EXIT_INVALID_INPUT
    except Exception:
        traceback.print_exc()
        return EXIT_FAILED
    finally:
        config.set_tolerances(previous)


if __name__ == "__main__":
    sys.exit(main())
