"""Build hook for the optional compiled kernel extension.

The package is pure Python by default.  If Cython and a C compiler are
available, `python setup.py build_ext --inplace` (or a regular pip build with
the `speed` extra installed) compiles productmix.kernels._fast; at import time
the package picks the compiled kernels up automatically and falls back to the
pure-Python twins otherwise.
"""

from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "productmix.kernels._fast",
                ["src/productmix/kernels/_fast.pyx"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
