import glob

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

# Everything except the CLI front end goes into the extension.
sources = sorted(s for s in glob.glob("src/*.cpp") if not s.endswith("cli.cpp"))
sources.append("bindings/module.cpp")

setup(
    ext_modules=[
        Pybind11Extension(
            "hyplab._hyplab",
            sources,
            include_dirs=["include", "vendor"],
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)
