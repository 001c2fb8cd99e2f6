"""Documented run_benchmark examples at full scale (20 seeded replicates)."""

import pytest

from stepclust.pipeline import run_benchmark


@pytest.mark.slow
def test_step_pattern_pam_ccr_band():
    _, (cell,) = run_benchmark(["step-pattern"], ["pam"], replicates=20, seed=2024)
    assert 0.96 <= cell["ccr_mean"] <= 1.0, cell


@pytest.mark.slow
def test_sinusoidal_pam_arand_band():
    _, (cell,) = run_benchmark(["sinusoidal"], ["pam"], replicates=20, seed=2024)
    assert 0.85 <= cell["arand_mean"] <= 0.95, cell
