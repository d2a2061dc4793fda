"""Build script: compiles the optional C kernel extension.

The package works without the extension (a numpy fallback is selected at
import time), so a missing Cython or C compiler only costs speed.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "entrank._kernels._ckern",
                ["src/entrank/_kernels/_ckern.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
