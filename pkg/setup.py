from setuptools import find_packages, setup

setup(
    name="gradflow",
    py_modules=["gradflow"],
    version="1.0.0",
    description=(
        "gradflow is a small convolutional network training library with "
        "hand-derived backpropagation, im2col convolutions, batch normalization, "
        "gradient checking and an MNIST command line."
    ),
    long_description=open("README.md").read(),
    long_description_content_type="text/markdown",
    license="MIT",
    packages=find_packages(exclude=["tests*"]),
    install_requires=[
        "numpy",
        "pandas",
        "pytest",
    ],
    entry_points={
        "console_scripts": ["gradflow=gradflow.cli.main:main"],
    },
    zip_safe=False,
    python_requires=">=3.10",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    include_package_data=True,
    extras_require={
        "dev": [
            "black",
            "build",
            "flake8",
            "pytest",
        ],
    },
)
