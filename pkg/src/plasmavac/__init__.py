"""Linearized plasma-vacuum interface problem with a full Maxwell vacuum.

Subpackages and modules:

* :mod:`plasmavac.linalg` small dense kernels (Jacobi, LU, characteristic polynomials)
* :mod:`plasmavac.plasma`, :mod:`plasmavac.vacuum` symmetric hyperbolic coefficient families
* :mod:`plasmavac.geometry` front lifting and the change of variables
* :mod:`plasmavac.boundary` boundary matrices, counts and energy forms
* :mod:`plasmavac.norms` gamma-weighted Sobolev norms
* :mod:`plasmavac.solver` the 2.5D method-of-lines solver
"""

__version__ = "0.1.0"
