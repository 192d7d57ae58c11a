import numpy as np
from numpy.testing import assert_allclose

from app.factorization import Factorization, closed_form_tailor_unitary, tailored_generators
from app.paper_examples import run_paper_examples, tailored_sz_closed_form


def test_every_worked_example_passes():
    results = run_paper_examples()
    failed = [f"{r.name}: expected {r.expected}, got {r.actual}" for r in results if not r.passed]
    assert not failed
    assert len({r.name for r in results}) == len(results)


def test_examples_log_one_line_each():
    lines = []
    results = run_paper_examples(on_log=lines.append)
    assert len(lines) == len(results)
    assert all(line.startswith("[examples] PASS ") for line in lines)


def test_closed_form_sz_for_unequal_coefficients():
    l1, l2 = 0.8, 0.6
    gens_a, _ = tailored_generators(Factorization(closed_form_tailor_unitary(l1, l2), (2, 2)))
    assert_allclose(gens_a[2], tailored_sz_closed_form(l1, l2), atol=1e-12)
    assert abs(np.trace(gens_a[2])) < 1e-12
