"""Build script for the optional compiled correction kernel.

The package is fully functional without the extension: ncolor._kernel
falls back to a vectorized numpy implementation when ncolor._ncbext is
not importable.
"""

from setuptools import Extension, setup

try:
    import numpy
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "ncolor._ncbext",
                ["src/ncolor/_ncbext.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    extensions = []

setup(ext_modules=extensions)
