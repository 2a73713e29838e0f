import numpy as np
from setuptools import setup

try:
    from Cython.Build import cythonize
except ImportError:  # the pure-Python fallback still works
    ext_modules = []
else:
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("ellbeta._kernels", ["src/ellbeta/_kernels.pyx"],
                   include_dirs=[np.get_include()],
                   extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
