import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from shirklab import ModelParams, ReplacementCostCurve, is_admissible  # noqa: E402


@pytest.fixture
def p0() -> ModelParams:
    return ModelParams(pi=0.9, eps=0.1, g=0.5, c=0.01, w=0.05, v_c=1.0)


@pytest.fixture
def linear_curve() -> ReplacementCostCurve:
    return ReplacementCostCurve.linear(1000.0)


#: Admissible parameter points spanning the interesting region, first is P0.
REFERENCE_POINTS = (
    ModelParams(pi=0.9, eps=0.1, g=0.5, c=0.01, w=0.05, v_c=1.0),
    ModelParams(pi=0.8, eps=0.05, g=0.6, c=0.02, w=0.08, v_c=1.5),
    ModelParams(pi=0.7, eps=0.15, g=0.5, c=0.03, w=0.08, v_c=1.2),
    ModelParams(pi=0.85, eps=0.0, g=0.8, c=0.05, w=0.1, v_c=2.0),
    ModelParams(pi=0.6, eps=0.05, g=1.2, c=0.08, w=0.3, v_c=3.0),
)


def draw_params(
    rng: np.random.Generator,
    attractive: bool = False,
    wage_margin: bool = False,
    max_tries: int = 10_000,
) -> ModelParams:
    """Rejection-sample an admissible parameter set.

    attractive  -- additionally require pi * (1 + g) > 1, so adopting the
        technology unvetted beats ignoring it in expectation.  The model's
        claims about realized-pay incentives hold on this region.
    wage_margin -- additionally require w * pi * (1 - 2 eps) > c, so at
        the minimal punishment rate a researching worker still prefers
        employment over opting out of the technology entirely; the
        effort equilibrium exists against the full strategy set only here.
    """
    for _ in range(max_tries):
        pi = float(rng.uniform(0.55, 0.97))
        eps = float(rng.uniform(0.02, 0.42))
        window_low = eps / (1.0 - eps)
        efficiency_cap = (1.0 - pi) * (1.0 - eps) / (pi * eps)
        g_low = window_low * 1.05
        if attractive:
            g_low = max(g_low, (1.0 - pi) / pi * 1.02)
        g_high = min((1.0 - eps) / eps, efficiency_cap, 4.0) * 0.95
        if g_low >= g_high:
            continue
        g = float(rng.uniform(g_low, g_high))
        efficiency_slack = (1.0 - pi) * (1.0 - eps) - pi * eps * g
        w = float(rng.uniform(0.01, 0.5))
        c_high = 0.8 * efficiency_slack
        if wage_margin:
            c_high = min(c_high, 0.9 * w * pi * (1.0 - 2.0 * eps))
        if c_high <= 1e-4:
            continue
        c = float(rng.uniform(1e-4, c_high))
        signal_good = pi * (1.0 - eps) + (1.0 - pi) * eps
        v_c_bound = (c + (1.0 - signal_good) * w) / ((1.0 - pi) * (1.0 - eps))
        v_c = v_c_bound * float(rng.uniform(1.05, 5.0))
        params = ModelParams(pi=pi, eps=eps, g=g, c=c, w=w, v_c=v_c)
        if is_admissible(params):
            return params
    raise RuntimeError("parameter sampler failed to find an admissible draw")


def draw_curve(rng: np.random.Generator, resolution: int = 4000) -> ReplacementCostCurve:
    """Random cost schedules: monotone, non-monotone, and finite samples."""
    kind = int(rng.integers(0, 5))
    base = float(rng.uniform(0.0, 20.0))
    swing = float(rng.uniform(0.5, 300.0))
    if kind == 0:
        return ReplacementCostCurve.from_function(lambda z: base + swing * z, resolution)
    if kind == 1:
        return ReplacementCostCurve.from_function(lambda z: base + swing * (1.0 - z), resolution)
    if kind == 2:
        waves = int(rng.integers(1, 6))
        phase = float(rng.uniform(0.0, np.pi))
        return ReplacementCostCurve.from_function(
            lambda z: base + swing * np.sin(np.pi * waves * z + phase) ** 2, resolution
        )
    if kind == 3:
        kink = float(rng.uniform(0.2, 0.8))
        return ReplacementCostCurve.from_function(
            lambda z: base + swing * np.abs(z - kink), resolution
        )
    n_samples = int(rng.integers(20, 300))
    return ReplacementCostCurve.from_samples(base + rng.uniform(0.0, swing, size=n_samples))
