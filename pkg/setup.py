import os

from setuptools import setup

# The compiled kernels are an optional fast path: everything works (exactly,
# just slower) with the pure-Python fallback, so a missing compiler or a
# failed cythonize must never break installation.
ext_modules = []
if os.environ.get("AGENTCAST_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "agentcast._kernels_c",
                    sources=["src/agentcast/_kernels_c.pyx"],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
        )
    except Exception as exc:  # pragma: no cover - depends on build host
        print(f"agentcast: building without compiled kernels ({exc})")
        ext_modules = []

setup(ext_modules=ext_modules)
