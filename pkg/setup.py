"""Builds the optional compiled search kernel; the package works without it."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RCG_NO_EXTENSION") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "rcg._ckernel",
                    ["src/rcg/_ckernel.pyx"],
                    language="c++",
                    extra_compile_args=["-O3", "-std=c++17"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
