import numpy as np
import pytest

from segal.synth import SynthConfig, generate
from segal.types import ProbMap


@pytest.fixture(scope="session")
def small_ds():
    """30 synthetic samples; enough for loop plumbing tests."""
    return generate(SynthConfig(num_samples=30, seed=11))


def random_probmap(rng, sample_id="pm", height=8, width=8, num_classes=5) -> ProbMap:
    raw = rng.random((height, width, num_classes)) + 1e-3
    return ProbMap.from_raw(sample_id, raw)


def random_distribution(rng, num_classes):
    raw = rng.random(num_classes) + 1e-3
    return raw / raw.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
