from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # pure-Python fallback only
    extensions = []
else:
    extensions = cythonize(
        [
            Extension(
                "pnkunits._orbit",
                ["src/pnkunits/_orbit.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=extensions)
