#!/usr/bin/env python

"""The setup script."""

from setuptools import setup, find_packages

with open('README.rst') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read()

requirements = ['numpy>=1.22', 'scipy>=1.8', 'pandas>=1.4', 'networkx>=2.8', 'tqdm>=4.60']

setup_requirements = ['pytest-runner', ]

test_requirements = ['pytest>=6', ]

setup(
    author="Haigang Liu",
    author_email='haigang@email.sc.edu',
    python_requires='>=3.8',
    classifiers=[
        'Development Status :: 2 - Pre-Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
    ],
    description="Influential spreaders on citation networks: VoteRank variants, centralities and SIR evaluation.",
    entry_points={
        'console_scripts': [
            'influence-toolbox=influence_toolbox.cli:main',
        ],
    },
    install_requires=requirements,
    license="MIT license",
    long_description=readme + '\n\n' + history,
    include_package_data=True,
    keywords='influence_toolbox voterank sir citation-network',
    name='influence_toolbox',
    packages=find_packages(include=['influence_toolbox', 'influence_toolbox.*']),
    setup_requires=setup_requirements,
    test_suite='tests',
    tests_require=test_requirements,
    version='0.1.0',
    zip_safe=False,
)
