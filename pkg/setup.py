"""Build script: compiles the optional Cython statistics kernels.

The package is fully functional without the extension (sqzkit._kernels falls
back to vectorized numpy implementations), so any failure here -- missing
Cython, missing compiler -- downgrades to a warning instead of aborting the
install.
"""

import warnings

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class optional_build_ext(build_ext):
    """build_ext that gives up gracefully instead of failing the install."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # toolchain missing entirely
            warnings.warn(f"skipping compiled kernels ({exc}); using pure-python fallback")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            warnings.warn(f"failed to build {ext.name} ({exc}); using pure-python fallback")


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        warnings.warn(f"Cython/numpy unavailable ({exc}); building without compiled kernels")
        return []
    return cythonize(
        [
            Extension(
                "sqzkit._kernels._rolling",
                ["src/sqzkit/_kernels/_rolling.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )


setup(ext_modules=extensions(), cmdclass={"build_ext": optional_build_ext})
