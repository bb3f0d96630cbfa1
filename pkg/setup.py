"""Build script.

The package is pure Python; an optional Cython extension accelerates the
lattice-reduction kernel. If Cython or a C compiler is unavailable the build
degrades to the pure-Python kernel selected at import time.

Build the accelerated kernel in place with:

    python setup.py build_ext --inplace
"""

import warnings

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """build_ext that treats compilation failure as a soft error."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            warnings.warn(f"compiled kernel skipped: {exc}")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"compiled kernel {ext.name} skipped: {exc}")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    from setuptools import Extension

    return cythonize(
        [Extension("quadexp._core._lll_cy", ["src/quadexp/_core/_lll_cy.pyx"])],
        language_level=3,
    )


setup(
    ext_modules=extensions(),
    cmdclass={"build_ext": OptionalBuildExt},
)
