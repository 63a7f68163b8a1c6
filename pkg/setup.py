#!/usr/bin/env python
"""Setup setfalab."""

import re

from setuptools import setup

DEV_REQUIREMENTS = [
    "black",
    "darglint",
    "mypy",
    "pytest",
    "pytest-timeout",
    "ruff",
]


with open("setfalab/__init__.py", "r", encoding="utf-8") as fh:
    version_re = re.search(r"^__version__ = \"([^\"]*)\"", fh.read(), re.MULTILINE)
assert version_re is not None, "Could not find version in setfalab/__init__.py"
version: str = version_re.group(1)


with open("setfalab/requirements.txt", "r", encoding="utf-8") as f:
    requirements: list[str] = [line for line in f.read().splitlines() if line and not line.startswith("#")]


with open("README.md", "r", encoding="utf-8") as f:
    long_description: str = f.read()


setup(
    name="setfalab",
    version=version,
    description="Dumbo AEAD, a gate-level Spongent Sbox model and a simulated SET fault attack",
    author="Benjamin Bolte",
    long_description=long_description,
    long_description_content_type="text/markdown",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Security :: Cryptography",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
    ],
    python_requires=">=3.10",
    install_requires=requirements,
    tests_require=DEV_REQUIREMENTS,
    extras_require={"dev": DEV_REQUIREMENTS},
    entry_points={
        "console_scripts": [
            "setfa=setfalab.scripts.setfa.__main__:main",
        ],
    },
    package_data={
        "setfalab": [
            "py.typed",
            "requirements*.txt",
        ],
    },
)
