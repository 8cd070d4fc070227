#!/usr/bin/env python
from os import path
import setuptools


def get_long_description():
    BASEDIR = path.abspath(path.dirname(__file__))
    with open(path.join(BASEDIR, 'README.rst'), encoding='utf-8') as f:
        return f.read()


setuptools.setup(
    name='wavelab',
    version='0.1.0',
    description='Numerical laboratory for a radial semilinear wave integral equation',
    long_description=get_long_description(),
    author='wavelab developers',
    license='AGPLv3',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU Affero General Public License v3',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: Implementation :: CPython',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    packages=[
        'wavelab',
        'wavelab.cli',
        'wavelab.util',
        'wavelab.experiments',
    ],
    entry_points={
        'console_scripts': [
            'wavelab = wavelab.cli.lab:main',
        ]
    },
    python_requires='>=3.8',
    install_requires=[
        'docopt>=0.6.2',
        'numpy>=1.17.0',
        'scipy>=1.4.0',
        'requests>=2.22.0',
        'matplotlib>=3.1.0',
    ],
)
