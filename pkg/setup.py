from setuptools import setup, find_packages

setup(
    name="irismpc",
    version="0.1",
    package_dir={"": "src"},
    packages=find_packages(where="src"),
    install_requires=[
        "numpy",
        "scipy",
        "cryptography",
        "tqdm",
        "matplotlib",
    ],
    entry_points={
        "console_scripts": ["irismpc=irismpc.scripts.cli:main"],
    },
)
