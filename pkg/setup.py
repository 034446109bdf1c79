from setuptools import find_packages, setup

setup(
    name="qutrit-projection-sim",
    version="0.1.0",
    description="Simulador de la proyección de dos qutrits de bifotones sobre un estado máximamente entrelazado",
    packages=find_packages(include=["src", "src.*"]),
    py_modules=["main"],
    include_package_data=True,
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.26",
        "scipy>=1.11",
        "pandas>=2.1",
        "jinja2>=3.1",
        "pyyaml>=6.0",
        "python-dotenv>=1.0",
    ],
    extras_require={"test": ["pytest>=7.4"]},
    entry_points={"console_scripts": ["sim = main:main"]},
)
