"""Build hook for the optional compiled Jacobi kernel.

If Cython or a C compiler is unavailable the package still installs and the
numpy fallback is used at runtime.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy as np  # noqa: F401
    from Cython.Build import cythonize
    from setuptools import Extension
except ImportError:
    pass
else:
    ext_modules = cythonize(
        [Extension("cmv_spectral.linalg._jacobi", ["src/cmv_spectral/linalg/_jacobi.pyx"], extra_compile_args=["-O3"])],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
