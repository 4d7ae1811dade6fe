"""Build script: compiles the optional forest accelerator.

The package works without the extension (a pure-Python kernel is selected at
import time), so a failed compile must not fail the install. Set
SEIZUREFIT_NO_EXT=1 to skip the extension entirely.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, etc.
            self._skip(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._skip(exc)

    @staticmethod
    def _skip(exc):
        print(f"WARNING: compiled forest kernel unavailable ({exc}); "
              "falling back to the pure-Python kernel")


def extensions():
    if os.environ.get("SEIZUREFIT_NO_EXT"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:
        print("WARNING: Cython/numpy not found; building without the compiled kernel")
        return []
    ext = Extension(
        "seizurefit.forest._speedups",
        ["src/seizurefit/forest/_speedups.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": 3,
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
