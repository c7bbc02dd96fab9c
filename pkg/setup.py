"""Build script: compiles the optional Cython enumeration kernel.

The package works without the extension (a pure-Python kernel is selected
at import time), so a failed extension build only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [Extension("randcycles._kernels_cy", ["src/randcycles/_kernels_cy.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
