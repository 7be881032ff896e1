"""Build script: compiles the traversal kernels unless PRIOHEAP_NO_EXT is set.

The package works without the extension (a pure-Python fallback is selected
at import time), so a failed compile is downgraded to a warning.
"""

import os
import sys

from setuptools import setup

ext_modules = []
if not os.environ.get("PRIOHEAP_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/prioheap/_kernels/_core.pyx"],
            compiler_directives={
                "language_level": "3",
                "boundscheck": False,
                "wraparound": False,
                "cdivision": True,
            },
        )
    except ImportError:
        print("warning: Cython unavailable, building without compiled kernels", file=sys.stderr)

setup(ext_modules=ext_modules)
