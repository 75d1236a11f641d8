"""
dilaton-ai
"""
from setuptools import setup
from pathlib import Path

tests_require = [
    "pytest",
    "joblib",
]

parent = Path(__file__).parent

REQUIRES = (parent / "requirements.txt").read_text().splitlines()
README = (parent / "README.md").read_text()

setup(
    name="dilaton-ai",
    version="0.1",
    description="Light propagation and atom interferometer phases in dilaton gravity",
    long_description=README,
    long_description_content_type="text/markdown",
    license="BSD-3-Clause License",
    tests_require=tests_require,
    install_requires=[
        "numpy",
        "joblib",
        "psutil",
        "pyyaml",
        "mpmath",
        "scipy",
    ],
    packages=['dilatonmodels'],
    package_dir={'dilatonmodels': 'dilatonmodels'},
    package_data={
        "dilatonmodels": ["README.md"]
    },
    py_modules=['dilatonai'],
    entry_points="""
        [console_scripts]
        dilatonai=dilatonai:cli_entry
    """,
)
