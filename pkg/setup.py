"""Builds the optional compiled similarity kernel.

The package works without it: guestlift.engine.kernels falls back to the
pure-Python implementation when the extension is absent.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "guestlift.engine.kernels._simcore",
                ["src/guestlift/engine/kernels/_simcore.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
