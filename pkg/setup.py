import os
from setuptools import setup


def read(fname):
    with open(os.path.join(os.path.dirname(__file__), fname)) as f:
        return f.read()


setup(
    name="whittakeroperators",
    version="0.0.1",
    description=("Whittaker functions and spectral theory of the Whittaker operator"),
    license="BSD-2-Clause",
    keywords="whittaker coulomb special-functions spectral scattering",
    packages=["whittakeroperators", "whittakeroperators.util"],
    install_requires=["numpy", "scipy", "mpmath"],
    entry_points={"console_scripts": ["whittaker = whittakeroperators.cli:main"]},
    long_description=read("README.md"),
)
