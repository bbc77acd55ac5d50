"""Build script: compiles the optional Cython simulation kernel.

The package works without the extension (a pure-Python engine is selected
at import time), so a failed compile downgrades to a warning rather than
aborting the install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the kernel if possible; fall back to pure Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"compiled kernel skipped ({exc}); using pure-Python engine")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"compiled kernel skipped ({exc}); using pure-Python engine")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - build env dependent
        return []
    return cythonize(
        [
            Extension(
                "ghznetsim._kernel",
                ["src/ghznetsim/_kernel.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
