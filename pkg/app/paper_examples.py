"""
Golden checks for the worked two-qubit examples: the singlet overlap, the
rho_U / rho_V family and their images under K, the tailored-observable
closed forms, and the teleportation expansion through Psi-.
"""
from dataclasses import dataclass
from math import sqrt
from typing import Callable

import numpy as np

from app.criteria import (
    Status,
    absolute_separability_value,
    decide_separability,
    kz_ball_member,
    kz_radius,
)
from app.factorization import (
    Factorization,
    model_vector,
    closed_form_tailor_unitary,
    schmidt_coefficients_in,
    tailor,
    tailored_generators,
    tps_report,
)
from app.linalg import (
    dagger,
    eigvals_desc,
    hs_distance,
    hs_inner,
    kron,
    max_abs,
    partial_transpose,
    pauli,
)
from app.log import safe_log
from app.states import bell_state, paper_state, tracial
from app.teleport import decompose_over_bell, resource_by_name


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    expected: str
    actual: str
    error: float

    @property
    def label(self) -> str:
        return "PASS" if self.passed else "FAIL"


def _numeric(name: str, actual, expected, tol: float) -> CheckResult:
    a = np.asarray(actual, dtype=complex)
    e = np.asarray(expected, dtype=complex)
    err = float(np.max(np.abs(a - e))) if a.shape == e.shape else float("inf")
    return CheckResult(
        name=name,
        passed=err <= tol,
        expected=_fmt(e),
        actual=_fmt(a),
        error=err,
    )


def _flag(name: str, actual, expected) -> CheckResult:
    return CheckResult(
        name=name,
        passed=actual == expected,
        expected=str(expected),
        actual=str(actual),
        error=0.0 if actual == expected else 1.0,
    )


def _fmt(a: np.ndarray) -> str:
    values = np.real_if_close(a, tol=1e6)
    if values.ndim == 0:
        return f"{complex(values).real:.12g}" if np.isrealobj(values) else str(complex(values))
    return np.array2string(np.round(values, 12), separator=", ", max_line_width=200)


def _sigma_dot_sigma():
    return sum(kron(pauli(n), pauli(n)) for n in "xyz")


def tailored_sz_closed_form(l1: float, l2: float) -> np.ndarray:
    """1/2 [l1^2 sz(x)I - l2^2 I(x)sz - l1 l2 sx(x)sx + l1 l2 sy(x)sy]."""
    eye = np.eye(2, dtype=complex)
    sx, sy, sz = pauli("x"), pauli("y"), pauli("z")
    return 0.5 * (
        l1 * l1 * kron(sz, eye)
        - l2 * l2 * kron(eye, sz)
        - l1 * l2 * kron(sx, sx)
        + l1 * l2 * kron(sy, sy)
    )


def run_paper_examples(on_log: Callable[[str], None] | None = None) -> list[CheckResult]:
    results: list[CheckResult] = []

    def add(result: CheckResult):
        results.append(result)
        safe_log(on_log, f"[examples] {result.label} {result.name} error={result.error:.2e}")

    eye4 = np.eye(4, dtype=complex)
    s = _sigma_dot_sigma()
    add(_numeric("singlet overlap with its local inversion", hs_inner((eye4 - s) / 4, (eye4 + s) / 4), -0.5, 1e-12))

    rho_u = paper_state("rho_U")
    rho_v = paper_state("rho_V")
    rho_ku = paper_state("rho_KU")
    rho_kv = paper_state("rho_KV")
    k = paper_state("K")
    t4 = tracial(2, 2).matrix

    add(_numeric("rho_U equals (I + sx(x)sx) / 4", rho_u.matrix, (eye4 + kron(pauli("x"), pauli("x"))) / 4, 1e-12))
    add(_numeric("spectrum of rho_U", eigvals_desc(rho_u.matrix), [0.5, 0.5, 0, 0], 1e-9))
    add(_numeric("spectrum of rho_V", eigvals_desc(rho_v.matrix), [3 / 8, 3 / 8, 1 / 8, 1 / 8], 1e-9))
    add(_numeric("distance rho_U to tracial", hs_distance(rho_u.matrix, t4), 0.5, 1e-12))
    add(_numeric("distance rho_V to tracial", hs_distance(rho_v.matrix, t4), 0.25, 1e-12))
    add(_numeric("KZ radius for D = 4", kz_radius(4), 1 / sqrt(12), 1e-12))
    add(_flag("rho_U outside KZ ball", kz_ball_member(rho_u), False))
    add(_flag("rho_V inside KZ ball", kz_ball_member(rho_v), True))
    add(_numeric("rho_KU = K rho_U K^dagger", k @ rho_u.matrix @ dagger(k), rho_ku.matrix, 1e-12))
    add(_numeric("rho_KV = K rho_V K^dagger", k @ rho_v.matrix @ dagger(k), rho_kv.matrix, 1e-12))

    pt_ku = partial_transpose(rho_ku.matrix, (2, 2), 1)
    x_u = np.array([1 - sqrt(2), 0, 0, 1], dtype=complex)
    add(_numeric("PT(rho_KU) x_U = (1 - sqrt2)/4 x_U", pt_ku @ x_u, (1 - sqrt(2)) / 4 * x_u, 1e-9))
    pt_kv = partial_transpose(rho_kv.matrix, (2, 2), 1)
    add(_numeric("spectrum of 8 PT(rho_KV)", eigvals_desc(8 * pt_kv), [2 + sqrt(2), 2, 2, 2 - sqrt(2)], 1e-9))
    add(_flag("rho_KU entangled", decide_separability(rho_ku).status, Status.ENTANGLED))
    add(_flag("rho_KV separable", decide_separability(rho_kv).status, Status.SEPARABLE))
    add(_flag("rho_U separable", decide_separability(rho_u).status, Status.SEPARABLE))
    add(_numeric("absolute separability value of rho_U", absolute_separability_value(rho_u), 0.5, 1e-9))
    add(_numeric("absolute separability value of rho_V", absolute_separability_value(rho_v), (1 - sqrt(3)) / 4, 1e-9))

    l1 = l2 = 1 / sqrt(2)
    u = closed_form_tailor_unitary(l1, l2)
    zero = np.zeros(4, dtype=complex)
    zero[0] = 1
    add(_numeric("closed-form U maps l1|00> + l2|11> to |0>", u @ model_vector(2, 2, [l1, l2]), zero, 1e-12))
    gens_a, gens_b = tailored_generators(Factorization(u, (2, 2)))
    add(_numeric("tailored S_z^A closed form", gens_a[2], tailored_sz_closed_form(l1, l2), 1e-12))
    report = tps_report(gens_a, gens_b)
    add(_flag("closed-form U induces a TPS", report.ok, True))

    for lam in ([0.8, 0.6], [1.0, 0.0]):
        fac, ga, gb = tailor(zero, 2, 2, lam)
        add(_numeric(f"tailor Schmidt coefficients for {lam}", schmidt_coefficients_in(zero, fac), sorted(lam, reverse=True), 1e-9))
        rep = tps_report(ga, gb)
        add(_flag(f"tailor commuting families for {lam}", rep.max_commutator < 1e-9, True))
        add(_flag(f"tailor algebra span for {lam}", rep.span_dim, 16))

    psi = np.array([0.6, 0.8j], dtype=complex)
    terms = decompose_over_bell(psi, resource_by_name("psi-"))
    add(_numeric("Psi- expansion amplitudes (Phi+, Phi-, Psi+, Psi-)", [t.amplitude for t in terms], [0.5, 0.5, -0.5, -0.5], 1e-12))
    a, b = psi
    expected = [[-b, a], [b, a], [a, -b], [a, b]]
    add(_numeric("Psi- expansion conditionals", [t.conditional.amplitudes for t in terms], expected, 1e-12))
    add(_numeric("Bell states orthogonal", abs(np.vdot(bell_state("phi+").amplitudes, bell_state("psi-").amplitudes)), 0.0, 1e-15))
    add(_numeric("closed-form U unitary", max_abs(dagger(u) @ u - eye4), 0.0, 1e-12))
    return results
