import os

from setuptools import Extension, setup

# The compiled kernel is an optimization, not a requirement: the package falls
# back to goalagenda._kernel_py when the extension is absent. Set
# GOALAGENDA_NO_EXT=1 to skip building it.
ext_modules = []
if os.environ.get("GOALAGENDA_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("goalagenda._speedups", ["src/goalagenda/_speedups.pyx"])],
            language_level="3",
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
