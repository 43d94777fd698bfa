import os
from pathlib import Path

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

HERE = Path(__file__).parent


def eigen_include() -> str:
    candidates = [
        os.environ.get("EIGEN3_INCLUDE_DIR"),
        "/usr/include/eigen3",
        "/usr/local/include/eigen3",
    ]
    for cand in candidates:
        if cand and Path(cand, "Eigen", "Core").exists():
            return cand
    raise RuntimeError("Eigen headers not found; set EIGEN3_INCLUDE_DIR")


sources = sorted(str(p.relative_to(HERE)) for p in (HERE / "src").glob("*.cpp"))
sources.append("python/module.cpp")

ext = Pybind11Extension(
    "oncache",
    sources=sources,
    include_dirs=["include", "vendor", eigen_include()],
    cxx_std=20,
)

setup(ext_modules=[ext], cmdclass={"build_ext": build_ext})
