"""Build script: compiles the Cython kernel extension when possible.

The extension is optional — if Cython or a C compiler is unavailable the
package installs pure-Python and `aginglab.backends` falls back to the
numpy kernels at import time.
"""

import numpy
from setuptools import setup

try:
    from Cython.Build import cythonize
    from setuptools import Extension

    extensions = cythonize(
        [
            Extension(
                "aginglab.backends._kernels",
                ["src/aginglab/backends/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
