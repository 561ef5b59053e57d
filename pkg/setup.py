#!/usr/bin/env python

"""
    Setup file for pramsey
"""

import os
import sys

from pramsey import check_numpy, fatal
from pramsey.version import __version__ as VERSION
from setuptools.command.test import test as TestCommand
from setuptools import find_packages, setup

if sys.version_info < (3, 8, 0):
    fatal('pramsey needs to be run with Python 3.8+')
check_numpy()
del sys.modules['pramsey']
del sys.modules['pramsey.version']

HERE = os.path.abspath(os.path.dirname(__file__))

NAME = 'pramsey'
DESCRIPTION = 'Construction and verification toolkit for P-Ramsey configurations of simplices'
KEYWORDS = 'euclidean ramsey simplex negative type distance geometry segment configuration brick spread'

CLASSIFIERS = [
    'Development Status :: 4 - Beta',
    'Environment :: Console',
    'Intended Audience :: Science/Research',
    'License :: OSI Approved :: MIT License',
    'Programming Language :: Python :: 3 :: Only',
    'Programming Language :: Python :: 3.8',
    'Programming Language :: Python :: 3.9',
    'Programming Language :: Python :: 3.10',
    'Topic :: Scientific/Engineering :: Mathematics',
]


class PyTest(TestCommand):

    """Runs the test suite plus the doctests of the package, with a coverage report"""

    user_options = [('cov-xml=', None, 'write coverage.xml'), ('junitxml=', None, 'write a junit xml report')]

    def initialize_options(self):
        TestCommand.initialize_options(self)
        self.cov_xml = True
        self.junitxml = 'junit.xml'

    def pytest_args(self):
        args = list(self.test_args) + ['--cov', NAME, '--cov-report', 'term-missing']
        if self.cov_xml:
            args += ['--cov-report', 'xml']
        if self.junitxml:
            args += ['--junitxml', self.junitxml]
        # -s keeps log output visible when LOGLEVEL asks for more than warnings
        verbose = os.getenv('LOGLEVEL', 'WARNING').upper() in ('DEBUG', 'INFO')
        return args + ['--doctest-modules', NAME, 'tests', '-vv', '-s' if verbose else '--capture=fd']

    def run_tests(self):
        try:
            import pytest
        except ImportError:
            raise RuntimeError('pytest is not installed, run: pip install pytest pytest-cov mock')
        sys.exit(pytest.main(self.pytest_args()))


def read(name):
    with open(os.path.join(HERE, name)) as f:
        return f.read()


def requirements():
    return [line.strip() for line in read('requirements.txt').splitlines() if line.strip()]


if __name__ == '__main__':
    setup(
        name=NAME,
        version=VERSION,
        description=DESCRIPTION,
        license='The MIT License',
        keywords=KEYWORDS,
        long_description=read('README.rst'),
        classifiers=CLASSIFIERS,
        packages=find_packages(exclude=['tests', 'tests.*']),
        install_requires=requirements(),
        tests_require=['flake8', 'mock>=2.0.0', 'pytest-cov', 'pytest'],
        cmdclass={'test': PyTest},
        entry_points={'console_scripts': ['pramseyctl = pramsey.ctl:ctl']},
        python_requires='>=3.8',
    )
