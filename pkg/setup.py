"""Build script: compiles the optional Cython accelerator when possible.

The package is fully functional without the extension (a NumPy fallback is
selected at import time), so a missing Cython or C compiler must never fail
the install.  Set COBOSON_NO_EXTENSION=1 to skip the build explicitly.
"""

import os

from setuptools import Extension, setup


def maybe_cythonize():
    if os.environ.get("COBOSON_NO_EXTENSION") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension("coboson._ckernels", ["src/coboson/_ckernels.pyx"])
    return cythonize([ext], language_level="3")


setup(ext_modules=maybe_cythonize())
