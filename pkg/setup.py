#!/usr/bin/env python
# -*- coding: utf-8 -*-
from __future__ import print_function
from setuptools import setup

with open("saberutils/include/VERSION", "r") as f:
    version = f.read().strip()

setup(
    name          = 'saberutils',
    version       = version,
    license       = 'BSD 3-Clause License',
    description   = 'Saber KEM on a striding Toom-Cook-4 multiplier, with a cycle model of its co-processor',
    packages      = ['saberutils'],
    package_data  = {'saberutils': ['include/*']},
    include_package_data = True,
    zip_safe      = False,
    python_requires = '>=3.6',
    install_requires = ['numpy'],
    extras_require = {'test': ['pytest', 'scipy']},
    scripts       = [
        'bin/sbu-version',
        # Key exchange on files
        'bin/sbu-keygen', 'bin/sbu-encaps', 'bin/sbu-decaps',
        # Regression and benchmarking
        'bin/sbu-kat', 'bin/sbu-bench',
        # Accelerator model
        'bin/sbu-simulate', 'bin/sbu-footprint', 'bin/sbu-asm',
        ]
    )
