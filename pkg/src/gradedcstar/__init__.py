"""Semilattice-graded C*-algebras at desk scale.

Construct, validate, and analyze C*-algebras graded by a finite
meet-semilattice, with every component a finite-dimensional complex
matrix algebra: structure morphisms and their bilinear counterparts,
total-algebra arithmetic and the C*-norm, split exact sequences, graded
morphism analysis, characters and spectra, Wedderburn decompositions and
K0, tensor products, and crossed products by finite groups.
"""

__version__ = "0.1.0"
