"""
Build script for quatspec, the spectral curve and Darboux transform toolkit.
"""

import os.path
import re
from pathlib import Path

import setuptools

HERE = Path(__file__).parent


def find_version(path, varname="__version__"):
    """Read the version string out of the package without importing it.
    """
    with open(path, 'r') as fobj:
        match = re.search(r"^{0} = ['\"]([^'\"]*)['\"]".format(varname), fobj.read(), re.M)
    if match is None:
        raise RuntimeError("No {} in {}".format(varname, path))
    return match.group(1)


def read_requirements(name="requirements.txt"):
    """The runtime stack, one requirement per line.
    """
    lines = (HERE / name).read_text().splitlines()
    return [line.strip() for line in lines if line.strip() and not line.startswith("#")]


setuptools.setup(
    name="quatspec",
    version=find_version(os.path.join("src", "quatspec", "__init__.py")),
    description=("Spectral curves of conformal tori in the 4-sphere, their "
                 "quaternionic holomorphic structures and Darboux transforms"),
    long_description=(HERE / "README.rst").read_text(),
    long_description_content_type="text/x-rst",
    license="Apache-2.0",
    keywords=[
        "differential geometry", "conformal tori", "Willmore energy",
        "spectral curve", "Darboux transform", "quaternions",
    ],
    package_dir={"": "src"},
    packages=[
        "quatspec",
        "quatspec.tools",
        "quatspec.utils",
    ],
    entry_points={
        "console_scripts": [
            "quatspec=quatspec.tools.cli:main",
        ],
    },
    python_requires=">=3.9",
    install_requires=read_requirements(),
    extras_require={
        "docs": ["Sphinx"],
        "test": ["pytest"],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3 :: Only",
        "Topic :: Scientific/Engineering :: Mathematics",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)
