"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (pure-numpy fallback is selected
at import time), so any failure to cythonize or compile downgrades the
install instead of breaking it.
"""

from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "cspca._kernels_cy",
                sources=["src/cspca/_kernels_cy.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level="3",
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
