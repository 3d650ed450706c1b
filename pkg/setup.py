"""Build script: compiles the hot-kernel extension when Cython is available.

The package works without it (pure-Python kernels are selected at import),
just much slower on the Monte Carlo paths.  Set RSL_NO_EXT=1 to skip the
extension on purpose.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("RSL_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        # -ffp-contract=off: fused multiply-adds would change rounding and
        # break bit-parity with the pure-Python kernels
        ext_modules = cythonize(
            [Extension("rsl._ckern", ["src/rsl/_ckern.pyx"],
                       extra_compile_args=["-O3", "-ffp-contract=off"])],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
