"""Builds the compiled scoring kernel.

The extension is optional: if Cython (or a C compiler) is unavailable the
package falls back to the numpy kernel selected in dxsim._kernels at import
time. Build in place with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "dxsim._kernels._score_cy",
                ["src/dxsim/_kernels/_score_cy.pyx"],
                include_dirs=[numpy.get_include()],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )

setup(ext_modules=ext_modules)
