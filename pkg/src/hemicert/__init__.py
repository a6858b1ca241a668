"""Rigorous numerics certifying a conformal deformation of the hemisphere.

Submodules:

- ``interval``, ``taylor``: outward-rounded interval arithmetic and Taylor models
- ``poly``, ``special``: exact polynomials in r and cos s, beta/gamma values
- ``spectral``: first-order eigenvalue variations of the equator
- ``curvature``: Hessian blocks and the sign conditions E1, E2, D
- ``dim2``, ``highdim``: the n = 2 and n >= 3 certificates
- ``jacobi``: the boundary correction and the second fundamental form integral
- ``report``, ``cli``: reports and the ``hemicert`` command
"""

__version__ = "1.0.0"
