from setuptools import setup

try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    # No Cython: install the pure-Python kernels only.
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "radperturb._kernels._ckernels",
                ["src/radperturb/_kernels/_ckernels.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
