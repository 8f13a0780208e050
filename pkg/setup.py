"""Numerical experiments on the Fourier decay of Cantor set images
under random walks: dyadic mass flows, Bernoulli walk ladders, exact
and Monte Carlo moment bounds, decay fits, and box, capacity and
Fourier dimension estimates, all seeded and byte-reproducible.

BSD-licensed, see LICENSE for more details.
"""

import sys
from setuptools import setup, find_packages


__version__ = '0.3.0-dev'
__license__ = 'BSD'

desc = ('Fourier decay and dimension experiments for Cantor set images'
        ' under random walks.')


if sys.version_info < (3, 6):
    raise NotImplementedError("Sorry, salemlab only supports Python >=3.6")


setup(name='salemlab',
      version=__version__,
      description=desc,
      long_description=__doc__,
      packages=find_packages(),
      install_requires=['boltons>=20.0.0',
                        'lithoxyl>=21.0.0',
                        'numpy>=1.17',
                        'matplotlib>=3.1'],
      entry_points={'console_scripts': ['salem-lab = salemlab.cli:main']},
      include_package_data=True,
      zip_safe=False,
      license=__license__,
      platforms='any',
      classifiers=[
          'Intended Audience :: Science/Research',
          'Topic :: Scientific/Engineering :: Mathematics',
          'License :: OSI Approved :: BSD License',
          'Programming Language :: Python :: 3.6',
          'Programming Language :: Python :: 3.7',
          'Programming Language :: Python :: 3.8',
          'Programming Language :: Python :: Implementation :: CPython',
      ]
)


"""
A brief checklist for release:

* tox
* git commit (if applicable)
* Bump setup.py and salemlab/common.py versions off of -dev
* git commit -a -m "bump version for x.y.z release"
* python setup.py sdist bdist_wheel upload
* git tag -a x.y.z -m "brief summary"
* write CHANGELOG
* git commit
* bump versions onto n+1 dev
* git commit
* git push

"""
