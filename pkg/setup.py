"""Build script for the optional compiled kernel.

The package works without the extension: ebmatch.kernel falls back to the
pure-Python implementation when the compiled module is missing or when
EBMATCH_PURE_PYTHON=1 is set.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("ebmatch._ckernel", ["src/ebmatch/_ckernel.pyx"])],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
