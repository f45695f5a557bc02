import numpy
from setuptools import Extension, setup

# The compiled kernel is optional: the package falls back to the numpy
# implementation in evimap.kernels when the extension is unavailable.
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [Extension("evimap._speedups", ["src/evimap/_speedups.pyx"])],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    ext_modules = []

setup(
    ext_modules=ext_modules,
    include_dirs=[numpy.get_include()],
)
