"""Setup script for tsforge"""

from setuptools import setup, find_packages

setup(
    name="tsforge",
    version="0.1.0",
    description="Transformer-encoder GAN for multi-channel time series",
    author="Min",
    python_requires=">=3.10",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.10.0",
        "pandas>=2.0.0",
        "pyyaml>=6.0.1",
        "python-dotenv>=1.0.0",
        "rich>=13.7.0",
    ],
    extras_require={
        "test": ["pytest>=7.4.0"],
    },
    entry_points={
        "console_scripts": [
            "tsforge=tsforge.main:main",
        ],
    },
)
