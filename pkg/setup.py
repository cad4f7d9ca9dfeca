from setuptools import setup, find_packages

setup(
    name="aromakit",
    version="0.1.0",
    description="Exact algebra of aromatic forests: the aromatic bicomplex, its homotopies and dimension tables",
    packages=find_packages(exclude=["test", "test.*", "examples", "examples.*"]),
    include_package_data=True,
    install_requires=[
        "click>=8.0.0",
        "pydantic>=2.0",
        "pyyaml",
        "numpy>=1.22",
        "sympy>=1.13",
    ],
    extras_require={
        "test": [
            "pytest>=7.0",
            "networkx>=2.8",
        ],
    },
    entry_points={
        "console_scripts": [
            "aromakit=cli.cli:cli",
        ],
    },
    python_requires=">=3.8",
)
