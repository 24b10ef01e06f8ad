"""Build script for the optional compiled sampling kernels.

The package is fully functional without the extension (a pure NumPy
backend is selected at import time); the Cython module just makes the
hot per-coordinate loops fast. If the toolchain is missing the build
degrades to pure-Python instead of failing.
"""
import os

import numpy
from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext

# numpy's C random-distribution entry points live in a static library
# shipped inside the package
_NPYRANDOM_DIR = os.path.join(os.path.dirname(numpy.random.__file__), "lib")


class optional_build_ext(build_ext):
    def run(self):
        try:
            super().run()
        except Exception as exc:  # no compiler / cython missing
            print(f"WARNING: compiled kernels skipped ({exc}); "
                  "falling back to the pure NumPy backend")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: building {ext.name} failed ({exc}); "
                  "falling back to the pure NumPy backend")


extensions = [
    Extension(
        "stiefel_mcmc.kernels._speedups",
        sources=["src/stiefel_mcmc/kernels/_speedups.pyx"],
        include_dirs=[numpy.get_include()],
        library_dirs=[_NPYRANDOM_DIR],
        libraries=["npyrandom"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

try:
    from Cython.Build import cythonize
    extensions = cythonize(extensions, language_level=3)
except ImportError:
    extensions = []

setup(ext_modules=extensions, cmdclass={"build_ext": optional_build_ext})
