from setuptools import setup, find_packages

setup(
    name="bebop-py",
    version="0.1.0",
    packages=find_packages(exclude=["TEST", "TEST.*", "examples", "examples.*"]),
    package_data={"Bebop.SCHEMA": ["stdlib/bebop/*.bop"]},
    install_requires=[
        "python-dotenv>=1.0.0",
        "pydantic>=2.0.0",
        "pydantic-settings>=2.0.0",
        "rich>=13.0.0",
        "click>=8.0.0",
        "typer>=0.9.0",
        "aiohttp>=3.9.0",
    ],
    extras_require={
        "test": [
            "pytest>=7.0.0",
            "pytest-asyncio>=0.21.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "bebopc=Bebop.CLI.Main:main",
            "bebop-bench=Bebop.CLI.Main:bench_main",
        ],
    },
    python_requires=">=3.10",
    author="Bebop Team",
    description="Fixed-width binary serialization with a schema compiler and RPC runtime",
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
)
