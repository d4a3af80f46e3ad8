import os

import pytest
from hypothesis import HealthCheck, settings

from naphase.localfield import LAURENT, PADIC, FieldConfig

settings.register_profile(
    "default",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", deadline=None, max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

KINDS = (PADIC, LAURENT)
PRIMES = (3, 5, 7)


@pytest.fixture(params=[(k, p) for k in KINDS for p in PRIMES], ids=lambda kp: f"{kp[0]}-{kp[1]}")
def cfg(request):
    kind, p = request.param
    return FieldConfig(kind, p, 24)
