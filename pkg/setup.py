from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = []
if cythonize is not None:
    extensions = cythonize(
        [
            Extension(
                "linv._core.kernels_cy",
                ["src/linv/_core/kernels_cy.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

# The package works without the extension (pure-Python kernels are selected
# at import time), so a failed build is not fatal for installation.
setup(ext_modules=extensions)
