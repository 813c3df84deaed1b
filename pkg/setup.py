"""Build script: compiles the optional bitset-enumeration kernel.

The package is fully functional without the extension; `modalteam._kernels`
falls back to the pure-Python implementation when the compiled module is
missing or when MODALTEAM_PURE_PY=1 is set.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "modalteam._kernels_c",
                ["src/modalteam/_kernels_c.pyx",],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"modalteam: skipping compiled kernel ({exc}); pure-Python fallback will be used")

setup(ext_modules=ext_modules)
