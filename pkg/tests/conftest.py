import pytest

from ellgrad.backend import available_backends


@pytest.fixture(params=sorted(available_backends()))
def backend(request):
    """Run backend-sensitive tests against every importable backend."""
    return available_backends()[request.param]
