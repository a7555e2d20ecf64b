"""Build script for the optional compiled kernel extension.

The package works without the extension (a pure-Python fallback is selected
at import time), but the compiled kernels are what make large sequences run
at real-time rates.
"""

import numpy as np
from Cython.Build import cythonize
from setuptools import setup
from setuptools.extension import Extension

extensions = [
    Extension(
        "motrack._kernels._native",
        ["src/motrack/_kernels/_native.pyx"],
        include_dirs=[np.get_include()],
        # -ffp-contract=off keeps float results bit-identical to the
        # pure-Python fallback (no fused multiply-add).
        extra_compile_args=["-O3", "-ffp-contract=off"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
