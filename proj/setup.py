import glob
import os

from pybind11.setup_helpers import ParallelCompile, Pybind11Extension, build_ext
from setuptools import setup

ParallelCompile("NPY_NUM_BUILD_JOBS").install()

# FFT-accelerated magnetostatics when fftw3 is available (optional)
define_macros = []
libraries = []
if os.path.exists("/usr/include/fftw3.h"):
    define_macros.append(("CHIRALMM_HAVE_FFTW", None))
    libraries.append("fftw3")

ext = Pybind11Extension(
    "chiralmm._core",
    sorted(glob.glob("src/*.cpp")) + ["bindings/pymodule.cpp"],
    include_dirs=["include", "vendor"],
    define_macros=define_macros,
    libraries=libraries,
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
