import os
import setuptools

with open("README.rst", "r", encoding="utf-8") as fh:
    long_description = fh.read()

# get __version__ from _version.py
ver_file = os.path.join('metriclust', '_version.py')
with open(ver_file, encoding="utf-8") as f:
    exec(f.read())

INSTALL_REQUIRES = [
    'numpy>=1.25',
    'pandas>=2.0',
    'scipy>=1.11',
    'rich>=13.7',
    'pyyaml>=6.0',
]

EXTRAS_REQUIRE = {
    'tests': [
        'pytest',
        'pytest-cov',
        'jsonschema'],
    'docs': [
        'sphinx',
        'sphinx-gallery',
        'sphinx_rtd_theme',
        'numpydoc',
        'myst-parser'
    ]
}

setuptools.setup(
    name="metriclust",
    version=__version__,
    author="J. Renero",
    author_email="jesus.renero@gmail.com",
    description="K-means under alternative metrics and two-phase Mahalanobis clustering",
    long_description=long_description,
    long_description_content_type="text/x-rst",
    url="https://github.com/renero/metriclust",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
    ],
    packages=setuptools.find_packages(exclude=["*.tests"]),
    package_data={"metriclust": ["schemas/*.json"]},
    install_requires=INSTALL_REQUIRES,
    extras_require=EXTRAS_REQUIRE,
    entry_points={
        "console_scripts": ["metriclust=metriclust.cli:main"],
    },
    python_requires=">=3.9"
)
