"""Build script: compiles the optional fast kernel extension.

The package works without the extension (stochlab.kernels falls back to the
vectorized numpy implementation), so any failure here downgrades to a
pure-Python install instead of aborting.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools.extension import Extension

    # -ffp-contract=off: the compiled kernels must be bit-identical to the
    # numpy fallback, so FMA contraction of a*b+c is disabled.
    ext_modules = cythonize(
        [
            Extension(
                "stochlab._kernels",
                ["src/stochlab/_kernels.pyx"],
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level="3",
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    sys.stderr.write(
        "stochlab: skipping compiled kernels (%s); using numpy fallback\n" % exc
    )

setup(ext_modules=ext_modules)
