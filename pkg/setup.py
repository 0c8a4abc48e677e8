"""Build shim: compile the Cython kernel extension when possible.

The package works without the extension (a numpy fallback is selected
at import time), so a missing compiler or Cython only costs speed.
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build-environment dependent
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "xxzquench._kernels",
                ["src/xxzquench/_kernels.pyx"],
            )
        ],
        language_level=3,
    )

setup(ext_modules=ext_modules)
