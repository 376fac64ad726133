import os

import numpy as np
from setuptools import Extension, setup

# The extension is optional: without Cython (or a compiler) the package falls
# back to dacnet._pykernels at import time.
ext_modules = []
if not os.environ.get("DACNET_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("dacnet._kernels", ["src/dacnet/_kernels.pyx"],
                       include_dirs=[np.get_include()],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
