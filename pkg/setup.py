import os

from setuptools import Extension, setup

# The compiled kernels are optional: the package falls back to the pure
# Python backend when ellgrad._core is absent. Set ELLGRAD_NO_EXT=1 to
# skip compilation entirely.
ext_modules = []
if not os.environ.get("ELLGRAD_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("ellgrad._core", ["src/ellgrad/_core.pyx"])],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
