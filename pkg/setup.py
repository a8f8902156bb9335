import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off: no FMA contraction, so the compiled kernels stay
# bit-identical to the pure-Python fallback (same IEEE double op sequence).
extensions = [
    Extension(
        "reconlab._ckernels",
        ["src/reconlab/_ckernels.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3", "-ffp-contract=off"],
    )
]

setup(ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"}))
