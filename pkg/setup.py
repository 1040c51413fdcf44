"""Build the optional Cython kernel core.

The package works without it: ``filament_lab.kernels`` falls back to the
numpy implementation when the compiled module is missing.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FILAMENT_LAB_NO_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "filament_lab._kernels_c",
                    ["src/filament_lab/_kernels_c.pyx"],
                    include_dirs=[numpy.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
                "initializedcheck": False,
            },
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
