# setup.py
# Copyright (C) 2025-2026 Kris Kirby, KE4AHR


from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

with open("requirements.txt", "r", encoding="utf-8") as fh:
    requirements = [line.split("#", 1)[0].strip() for line in fh if line.strip() and not line.startswith("#")]
    requirements = [r for r in requirements if r and not r.startswith("pytest")]

setup(
    name="qaoa-transferability",
    version="1.0.0",
    author="Kris Kirby, KE4AHR",
    description="Depth-1 QAOA MaxCut parameter transferability toolkit",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(include=["qaoatransfer", "qaoatransfer.*"]),
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: GNU General Public License v3 (GPLv3)",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: 3.12",
        "Topic :: Scientific/Engineering :: Physics",
    ],
    python_requires=">=3.10",
    install_requires=requirements,
    extras_require={"test": ["pytest>=8.1.0"]},
    entry_points={
        "console_scripts": [
            "qaoatransfer=qaoatransfer.cli:main",
        ],
    },
    include_package_data=True,
    package_data={
        "qaoatransfer": ["data/*.json"],
    },
    keywords="qaoa maxcut parameter-transfer lightcone quantum-optimization",
    license="GPLv3",
    platforms=["any"],
)
