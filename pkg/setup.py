import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "waveop._kernels._core",
    ["src/waveop/_kernels/_core.pyx"],
    include_dirs=[np.get_include()],
    extra_compile_args=["-O3"],
)

setup(ext_modules=cythonize([ext], compiler_directives={"language_level": "3"}))
