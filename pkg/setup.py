from setuptools import setup, Extension
from Cython.Build import cythonize
from numpy import get_include as numpy_include

exts = [
    Extension(
        "lmcnet._kernels",
        ["src/lmcnet/_kernels.pyx"],
        include_dirs=[numpy_include()],
        extra_compile_args=["-O3"],
    )
]

setup(ext_modules=cythonize(exts, language_level=3))
