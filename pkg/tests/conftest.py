import pytest

from prioheap._kernels import pure

try:
    from prioheap._kernels import _core
except ImportError:
    _core = None

_backends = {"pure": pure}
if _core is not None:
    _backends["compiled"] = _core


@pytest.fixture(params=sorted(_backends))
def kernels(request):
    """Kernel backend under test; compiled only appears when built."""
    return _backends[request.param]
