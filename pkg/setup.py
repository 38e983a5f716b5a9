"""Build script: compiles the optional native kernel.

The package works without the extension (a pure-Python kernel is selected at
import time); compilation failures are downgraded to a warning so source
installs on odd toolchains still succeed.
"""

import warnings

from setuptools import Extension, setup


def native_extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        warnings.warn("Cython not available, building without native kernel")
        return []
    return cythonize(
        [Extension("sheetstruct.kernel._native",
                   ["src/sheetstruct/kernel/_native.pyx"])],
        compiler_directives={"language_level": "3"},
    )


setup(ext_modules=native_extensions())
