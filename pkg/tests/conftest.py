import os
import tempfile

# Loggers open their files at import time, so the log home must be set first
os.environ.setdefault("KMSDYN_HOME", tempfile.mkdtemp(prefix="kmsdyn-tests-"))

import pytest  # noqa: E402

from kmsdyn.sphere import parse_map  # noqa: E402

REES_LAMBDA = "0.3+0.9i"


@pytest.fixture
def square():
    return parse_map("z^2")


@pytest.fixture
def chebyshev():
    return parse_map("z^2 + c", {"c": -2})


@pytest.fixture
def parabolic():
    return parse_map("z*(1+z/2)^2")


@pytest.fixture
def rees():
    return parse_map("l*(1 - 2/z)^2", {"l": REES_LAMBDA})


@pytest.fixture
def ruelle():
    return parse_map("z^2 + c", {"c": "0.1"})
