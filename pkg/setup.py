"""Build script.

The compiled kernel core is optional: when Cython is unavailable the package
installs pure Python and selects the NumPy fallback at import time.  The
extension is compiled with FP contraction disabled so that both backends
execute the same IEEE-754 operation sequence and return bit-identical
results.
"""
from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "metriclaw._core",
                ["src/metriclaw/_core.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
