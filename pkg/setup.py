"""Build script for the compiled simulation kernel.

The package works without the extension (a pure-Python kernel is picked
up at import time), so a missing C compiler only costs speed.  To build
in place: python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("plateau_rt._kernel_cy", ["src/plateau_rt/_kernel_cy.pyx"])],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
