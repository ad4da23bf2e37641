import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

ext_modules = [
    Extension(
        "fraclangevin._kernels",
        ["src/fraclangevin/_kernels.pyx"],
        include_dirs=[np.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
        optional=True,
    ),
    # fast-math lets gcc vectorise the power loops through libmvec; the
    # kernels there only take powers of positive finite numbers
    Extension(
        "fraclangevin._kernels_l1",
        ["src/fraclangevin/_kernels_l1.pyx"],
        include_dirs=[np.get_include(), "src/fraclangevin"],
        depends=["src/fraclangevin/_vecpow.h"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3", "-ffast-math"],
        libraries=["m"],
        optional=True,
    ),
]

setup(ext_modules=cythonize(ext_modules, language_level=3))
