import setuptools

with open("gaussduet/__init__.py") as fp:
    version = next(line.split('"')[1] for line in fp if line.startswith("__version__"))

with open("README.md", "r") as fh:
    long_description = fh.read()
setuptools.setup(
    name="gaussduet",
    version=version,
    description="Closed-form and covariance-propagation dynamics of two coupled damped bosonic modes in squeezed "
                "reservoirs",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=setuptools.find_packages(exclude=['test']),
    package_data={"gaussduet": ["templates/*.j2"]},
    include_package_data=False,
    keywords="gaussian quantum optics squeezing covariance lyapunov beamsplitter parametric",
    python_requires=">=3.8",
    install_requires=[
        "numpy",
        "scipy",
        "Jinja2",
    ],
    extras_require={
        "tests": ["pytest", "hypothesis"],
        "docs": ["sphinx", "sphinx_rtd_theme"]
    },
    entry_points={
        "console_scripts": ["gaussduet = gaussduet.cli:main"]
    },
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Physics",
    ],
)
