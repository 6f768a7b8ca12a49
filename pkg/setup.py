"""Build script for the compiled shortest-path kernel.

The extension is optional: if Cython or a C compiler is unavailable the
package falls back to the pure-Python kernel at import time.  Build in
place for development with

    python setup.py build_ext --inplace
"""

import numpy as np
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

ext_modules = []
if cythonize is not None:
    ext_modules = cythonize(
        [Extension(
            "systolic._kernels._dijkstra",
            ["src/systolic/_kernels/_dijkstra.pyx"],
            include_dirs=[np.get_include()],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            extra_compile_args=["-O3"],
        )],
        compiler_directives={"language_level": 3},
    )

setup(ext_modules=ext_modules)
