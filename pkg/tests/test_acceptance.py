"""Release gate: every acceptance check must pass at its stated tolerance.

Each test runs exactly one named check from ibrownian.acceptance and
prints its one-line verdict (run pytest with -s or look at the captured
output of failures).  The twelve tests mirror the registry order; all
seeds are frozen inside the checks, so the printed numbers are stable.
"""

import pytest

from ibrownian.acceptance import CHECKS


def _run(name: str):
    result = CHECKS[name]()
    print(result.line())
    assert result.passed, result.line()


@pytest.mark.acceptance
def test_criterion_01_ginibre_bulk_intensity():
    _run("ginibre-bulk-intensity")


@pytest.mark.acceptance
def test_criterion_02_airy_edge_density():
    _run("airy-edge-density")


@pytest.mark.acceptance
def test_criterion_03_airy_special_function():
    _run("airy-special-function")


@pytest.mark.acceptance
def test_criterion_04_bessel_kernel_identity():
    _run("bessel-kernel-identity")


@pytest.mark.acceptance
def test_criterion_05_dyson_stationarity():
    _run("dyson-stationarity")


@pytest.mark.acceptance
def test_criterion_06_ito_square_root_consistency():
    _run("ito-square-root-consistency")


@pytest.mark.acceptance
def test_criterion_07_airy_drift_truncation_trend():
    _run("airy-drift-truncation-trend")


@pytest.mark.acceptance
def test_criterion_08_ginibre_variant_gap():
    _run("ginibre-variant-gap")


@pytest.mark.acceptance
def test_criterion_09_non_collision():
    _run("non-collision")


@pytest.mark.acceptance
def test_criterion_10_holder_moment_slope():
    _run("holder-moment-slope")


@pytest.mark.acceptance
def test_criterion_11_tail_sum_decay():
    _run("tail-sum-decay")


@pytest.mark.acceptance
def test_criterion_12_sampler_closed_forms():
    _run("sampler-closed-forms")


def test_registry_covers_every_criterion():
    # twelve criteria, twelve named checks, no extras
    assert len(CHECKS) == 12
