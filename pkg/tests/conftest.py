import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("default")


def err64(original, reconstructed) -> float:
    a = np.asarray(getattr(original, "values", original), dtype=np.float64).ravel()
    b = np.asarray(getattr(reconstructed, "values", reconstructed), dtype=np.float64).ravel()
    return float(np.max(np.abs(a - b)))


def random_field_values(rng, n: int, kind: int) -> np.ndarray:
    """Mixed generator families used across round-trip tests."""
    from ufzx import synth

    kind = kind % 3
    if kind == 0:
        lo, hi = sorted(rng.normal(0.0, 50.0, 2))
        width = max((hi - lo) / 2, 1e-6)
        return synth.white_noise(rng, n, width=width, offset=(lo + hi) / 2)
    if kind == 1:
        return synth.random_walk(
            rng, n, step=float(10.0 ** rng.uniform(-4, 1)), start=float(rng.normal(0, 50))
        )
    return synth.plateaus(rng, n, n_levels=int(rng.integers(2, 8)))


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)
