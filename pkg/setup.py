import numpy as np
from Cython.Build import cythonize
from setuptools import Extension, setup

# No -ffast-math and no FP contraction: the double-double kernels rely on
# exactly rounded IEEE +, *, fma.
extensions = [
    Extension(
        "cglab._ddcore",
        ["src/cglab/_ddcore.pyx"],
        include_dirs=[np.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
)
