"""Build script for the optional compiled kernel.

The package is fully functional without the extension: chids.kernels falls
back to the pure-Python twin when `chids._speedups` is missing, so a failed
compile only costs speed, never correctness.
"""

import os
import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Tolerate a missing/broken C toolchain; the fallback kernel takes over."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"compiled kernel skipped ({exc}); using pure-Python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - toolchain dependent
            warnings.warn(f"compiled kernel skipped ({exc}); using pure-Python fallback")


ext_modules = []
if not os.environ.get("CHIDS_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "chids._speedups",
                    ["src/chids/_speedups.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level="3",
        )
    except ImportError:  # pragma: no cover - build environment dependent
        warnings.warn("Cython not available; building without the compiled kernel")

setup(ext_modules=ext_modules, cmdclass={"build_ext": OptionalBuildExt})
