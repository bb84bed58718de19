#!/usr/bin/env python3

import os
from setuptools import setup, find_packages

package_dir = os.path.join(os.path.dirname(os.path.abspath(__file__)), "mintt")


def find_templates():
    files = []
    for path, directories, filenames in os.walk(package_dir):
        if "templates" not in path.split(os.path.sep):
            continue
        for file in filenames:
            if not file.endswith(".j2"):
                continue
            files.append(os.path.relpath(os.path.join(path, file), package_dir))
    return files


test_reqs = ["pytest", "pytest-cov", "mock", "faker", "tox"]

setup(
    name="mint-t",
    version="1.0",
    description=(
        "Nonparametric estimation of total causal effects in stationary "
        "time series by marginal integration and L2-boosting."
    ),
    packages=find_packages(),
    python_requires=">=3.9",
    install_requires=[
        "click",
        "jinja2",
        "numpy>=1.22",
        "scipy",
        "pandas>=1.5",
        "graphviz",
    ],
    package_data={"mintt": find_templates()},
    extras_require={"test": test_reqs},
    tests_require=test_reqs,
    entry_points="""
        [console_scripts]
        mint-t=mintt.cli:cli
    """,
)
