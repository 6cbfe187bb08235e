from setuptools import setup, find_packages

setup(
    name="opportunistic-scheduler",
    version="0.1",
    packages=find_packages(include=["app", "app.*"]),
    install_requires=[
        "numpy>=1.24.0",
        "scipy>=1.11.0",
        "pydantic>=2.0.0",
        "click>=8.1.0",
        "python-dotenv>=1.0.0",
    ],
    entry_points={
        "console_scripts": [
            "opportunistic-scheduler=app.cli:cli",
        ],
    },
)
