"""
GHRR: generalized holographic reduced representations with unitary matrix elements.
"""
import os
import re

from setuptools import setup


HERE = os.path.abspath(os.path.dirname(__file__))
VERSION_RE = re.compile(r"""__version__ = ['"]([0-9.]+)['"]""")


def get_version():
    init = open(os.path.join(HERE, "ghrr", "version.py")).read()
    return VERSION_RE.search(init).group(1)


with open('README.rst', 'r') as f:
    long_description = f.read()

setup(
    name='ghrr',
    version=get_version(),
    description='Hypervectors of unitary matrices: binding, bundling, encoders and the experiments around them.',
    long_description=long_description,
    license='MIT',
    packages=[
        'ghrr',
        'ghrr.commands',
    ],
    python_requires='>=3.8',
    install_requires=[
        'click',
        'numpy',
        'scipy',
        'tabulate',
        'termcolor',
    ],
    extras_require={
        'dev': [
            'coverage',
            'ddt',
            'mock',
            'pep8',
            'pylint',
            'pytest',
        ],
    },
    include_package_data=True,
    entry_points={
        'console_scripts': [
            'ghrr=ghrr.cli:cli',
        ],
    },
    test_suite='tests',
    classifiers=[
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Software Development :: Libraries :: Python Modules',
        'Intended Audience :: Science/Research',
        'Intended Audience :: Developers',
    ],
)
