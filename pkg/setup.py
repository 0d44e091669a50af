"""Builds the optional compiled kernel.

The package is fully functional without it (a pure-Python twin is selected
at import time), so any failure to cythonize or compile downgrades to a
pure-Python install instead of breaking it.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/darbouxforge/_speedups.pyx"],
        language_level=3,
    )
except Exception as exc:  # noqa: BLE001 - any build issue falls back to pure Python
    print(f"darbouxforge: skipping compiled kernel ({exc}); using pure Python")

setup(ext_modules=ext_modules)
