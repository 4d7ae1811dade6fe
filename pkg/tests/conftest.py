import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from seizurefit.gof import FeatureVector


@pytest.fixture
def separable_features():
    """200 labeled vectors with class-dependent means, trivially separable."""
    rng = np.random.default_rng(0)
    out = []
    for i in range(200):
        label = i % 2
        base = 0.25 if label == 0 else 0.75
        vals = np.clip(rng.normal(base, 0.07, 4), 0.0, 1.0)
        out.append(FeatureVector(*vals, epoch=i // 4, channel="CH1",
                                 segment=i, label=label))
    return out
