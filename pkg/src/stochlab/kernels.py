"""Backend selection for the bulk draw kernels.

The compiled extension is preferred when importable; the numpy fallback is
always available. Both produce bit-identical streams, so switching backends
never changes results, only throughput. `use_backend` exists for the
benchmark and the equivalence tests.
"""

from . import _kernels_py

try:
    from . import _kernels
except ImportError:  # pragma: no cover - build-environment dependent
    _kernels = None

_impl = _kernels if _kernels is not None else _kernels_py

GAMMA = _kernels_py.GAMMA


def backend() -> str:
    """Name of the active backend: 'compiled' or 'python'."""
    return _impl.BACKEND


def available_backends() -> tuple[str, ...]:
    if _kernels is not None:
        return ("compiled", "python")
    return ("python",)


def use_backend(name: str) -> None:
    """Force a backend by name. Raises ValueError if it is not available."""
    global _impl
    if name == "python":
        _impl = _kernels_py
    elif name == "compiled":
        if _kernels is None:
            raise ValueError("compiled kernels are not available in this install")
        _impl = _kernels
    else:
        raise ValueError(f"unknown backend {name!r}")


def bits(key: int, start: int, n: int):
    return _impl.bits(key, start, n)


def uniforms(key: int, start: int, n: int):
    return _impl.uniforms(key, start, n)


def normals(key: int, start: int, n: int):
    return _impl.normals(key, start, n)
