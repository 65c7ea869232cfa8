"""Builds the optional compiled SAT core; the package works without it."""
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("fsmmint.sat._cdcl", ["src/fsmmint/sat/_cdcl.pyx"],
                   language="c++", extra_compile_args=["-O2"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
