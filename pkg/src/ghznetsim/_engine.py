"""Engine selection: compiled kernel when available, pure Python otherwise.

The two engines implement identical semantics and consume the uniform
stream identically; ``engine="auto"`` (the default everywhere) picks the
compiled one when the extension was built. Pass ``engine="python"`` or
``engine="compiled"`` to force a side, e.g. for the parity tests and the
benchmark.
"""

from __future__ import annotations

from . import _engine_py

try:  # pragma: no cover - depends on whether the extension was built
    from . import _kernel
except ImportError:  # pragma: no cover
    _kernel = None

PROTO_CODES = {"SP": 0, "SP-tree": 1, "MP-G+": 2, "MP-C": 3, "MP-P": 4}


def available_engines() -> tuple:
    return ("python", "compiled") if _kernel is not None else ("python",)


def default_engine() -> str:
    return "compiled" if _kernel is not None else "python"


def get_engine(name: str = "auto"):
    if name == "auto":
        name = default_engine()
    if name == "python":
        return _engine_py
    if name == "compiled":
        if _kernel is None:
            raise RuntimeError("compiled kernel is not available; rebuild the extension "
                               "or use engine='python'")
        return _kernel
    raise ValueError(f"unknown engine {name!r} (expected auto, python or compiled)")
