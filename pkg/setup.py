from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [Extension("crossec._kernel", ["src/crossec/_kernel.pyx"])],
        language_level=3,
    )
except Exception:
    # no Cython toolchain: the pure-Python kernel twin is used instead
    ext_modules = []

setup(ext_modules=ext_modules)
