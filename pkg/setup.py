"""Builds the optional Cython kernel module; the package works without it."""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("STOCKCAST_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "stockcast._ckernels",
                    ["src/stockcast/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": 3},
        )

setup(ext_modules=ext_modules)
