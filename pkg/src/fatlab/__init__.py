"""fatlab: exact-arithmetic models of fat extensions over finite groupoids.

The package implements, over finite groupoids and finite-dimensional rational
vector spaces, the algebra of 2-term complexes and their invertible-homotopy
groups, split representations up to homotopy, fat extensions with their
VB-groupoid and general linear PB-groupoid models, core extensions with the
double groupoids they generate, and the Lie-algebra (base = point) picture.
Every identity is verifiable with zero tolerance; `fatlab.cli` drives the
verification suites.
"""

__version__ = "0.1.0"
