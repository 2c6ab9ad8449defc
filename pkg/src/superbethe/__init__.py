"""Exact engine for graded transfer-matrix eigenvalue functions.

Builds the factored q-bracket functions attached to skew Young
superdiagrams for the gl(r+1|s+1) family of graded vertex models, and
verifies their determinant representations, bilinear functional relations,
vanishing and duality properties, Bethe-equation pole cancellations, and
agreement with brute-force transfer-matrix spectra.
"""

from .qarith import (QParameter, BracketAtom, FactoredTerm, TermSum,
                     bracket, equals, same_terms, shift_u, reflect_u,
                     residue_at, limit_at_infinity, to_float)
from .diagrams import Partition, SkewShape, conjugate, contains_rectangle
from .tableaux import LabelSet, Tableau, enumerate_tableaux, count_tableaux
from .dvf import (BetheRootSet, RootSystemConfig, preset, draw_bethe_roots,
                  t_skew, t_series, jacobi_trudi)

__version__ = "0.1.0"
