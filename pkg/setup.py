"""Build script: compiles the optional simulation kernel.

The compiled extension is an accelerator only. If Cython or a C compiler
is unavailable (or ENGAGEKIT_PURE=1 is set), the build proceeds without it
and the package falls back to the vectorized NumPy kernel at import time.
"""

import os

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that downgrades compilation failures to a warning."""

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
        print(f"WARNING: skipping compiled simulation kernel ({exc}); "
              "the pure NumPy backend will be used")


def extensions():
    if os.environ.get("ENGAGEKIT_PURE"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        optional_build_ext._skip(exc)
        return []
    ext = Extension(
        "engagekit._simkernel",
        ["src/engagekit/_simkernel.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
