import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=int(os.environ.get("HYPOTHESIS_EXAMPLES", "40")),
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def lmg75():
    """Multiprecision LMG model at S = 75, J = 2 and its decomposition; shared because it takes seconds."""
    from krylovlab.models import build_lmg, eigendecompose

    model = build_lmg(75, 2.0, precision=512)
    return model, eigendecompose(model.H_tilde)
