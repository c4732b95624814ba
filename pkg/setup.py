"""Build script: compiles the optional Cython kernel extension.

The extension is a performance add-on; if no compiler (or no Cython) is
available the package installs anyway and falls back to the pure NumPy/SciPy
kernels at import time.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """Build the extension if possible, warn and continue if not."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # compiler missing, broken toolchain, ...
            self._warn(exc)

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            self._warn(exc)

    @staticmethod
    def _warn(exc):
        print(
            "WARNING: building the compiled kernels failed (%s); "
            "installing with the pure Python backend only." % (exc,),
            file=sys.stderr,
        )


def make_extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(
            "WARNING: %s; skipping compiled kernels." % (exc,), file=sys.stderr
        )
        return []
    from setuptools import Extension

    ext = Extension(
        "prootkit._kernels",
        sources=["src/prootkit/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
