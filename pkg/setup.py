import setuptools
from pathlib import Path

README = (Path(__file__).parent / "README.md").read_text()


setuptools.setup(
    name="pshlab",
    # version is managed by setuptools_scm
    description="Levi geometry, finite type and sampled certificates for domains in C^2",
    long_description=README,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=["tests", "tests.*"]),
    license="MIT",
    classifiers=[
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.8",
    install_requires=["numpy>=1.20", "scipy>=1.7"],
    include_package_data=True,  # needs to be kept even if setuptools_scm is used
    use_scm_version={"fallback_version": "0.1.0"},
    entry_points={"console_scripts": ["pshlab=pshlab.cli:main"]},
    extras_require={"dev": ["build", "black", "pylint", "pytest", "hypothesis"]},
)
