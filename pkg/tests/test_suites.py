import pytest

from dgdeform.errors import UnknownSuite
from dgdeform.scalar import I_HBAR
from dgdeform.script import run_script
from dgdeform.suites import SUITES, run_suite


def test_unknown_suite():
    with pytest.raises(UnknownSuite):
        run_suite("nope")


@pytest.mark.parametrize("name", ["assoc-derham", "complexes-deformed-compose", "functoriality"])
def test_deterministic(name):
    a = run_suite(name, trials=4, seed=11)
    b = run_suite(name, trials=4, seed=11)
    assert a.ok and b.ok and a.checks == b.checks > 0


@pytest.mark.parametrize("name", sorted(set(SUITES) - {"s-equivalence", "dgla-exactness"}))
def test_small_runs_pass(name):
    rep = run_suite(name, trials=3, seed=2)
    assert rep.ok, rep.text()


def test_failures_reproduce():
    rep = run_suite("s-equivalence", trials=30, seed=1)
    assert not rep.ok
    for f in rep.failures[:3]:
        out, failures = run_script(f.script)
        assert failures >= 1, out


def test_dgla_failure_reproduces():
    rep = run_suite("dgla-exactness", trials=60, seed=1)
    assert not rep.ok
    out, failures = run_script(rep.failures[0].script)
    assert failures >= 1, out


def test_opposite_lambda_passes():
    assert run_suite("s-equivalence", trials=30, seed=1, lam=-I_HBAR).ok
    assert run_suite("dgla-exactness", trials=60, seed=1, signs="cyclic").ok


def test_negative_controls_record_witnesses():
    rep = run_suite("negative-controls")
    assert rep.ok and rep.checks == 6
    assert any("-4*h^2" in n for n in rep.notes)
