import numpy as np
import pytest

from uiot.dataset import Dataset, make_screen_set


def unit_rows(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    block = rng.normal(size=(n, d))
    return block / np.linalg.norm(block, axis=1, keepdims=True)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_dataset():
    """Three 2-d apps on recognisable directions: two near e1, one on e2."""
    e1 = np.array([1.0, 0.0])
    e2 = np.array([0.0, 1.0])
    mixed = np.array([1.0, 1.0]) / np.sqrt(2.0)
    apps = [
        make_screen_set(
            "alpha-v0",
            np.vstack([e1, e1, mixed]),
            screenshot_ids=["a", "b", "c"],
            name="alpha",
            platform="ios",
            category="finance",
            snapshot_date="2022-01-01",
        ),
        make_screen_set(
            "alpha-v1",
            np.vstack([e1, mixed]),
            screenshot_ids=["a", "b"],
            name="alpha",
            platform="android",
            category="finance",
            snapshot_date="2022-06-01",
        ),
        make_screen_set(
            "beta-v0",
            np.vstack([e2, e2]),
            screenshot_ids=["a", "b"],
            name="beta",
            platform="ios",
            category="travel",
            snapshot_date="2022-01-01",
        ),
    ]
    return Dataset(apps, embedding_dim=2, category_vocabulary=["finance", "travel"])


class StubTextEncoder:
    """Deterministic text encoder: fixed mapping or a hashed fallback."""

    def __init__(self, mapping=None, dim=4):
        self.mapping = mapping or {}
        self.expected_dim = dim

    def encode_text(self, text: str) -> np.ndarray:
        if text in self.mapping:
            return np.asarray(self.mapping[text], dtype=np.float32)
        seed = abs(hash(text)) % (2**32)
        v = np.random.default_rng(seed).normal(size=self.expected_dim)
        return (v / np.linalg.norm(v)).astype(np.float32)


@pytest.fixture
def stub_text_encoder():
    return StubTextEncoder
