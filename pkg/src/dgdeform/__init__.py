"""Exact first-order deformations of differential graded structures.

Scalars live in Q(i)[e] with h = i*e^2.  The main entry points:

* :class:`GradedContext`, :class:`Element`, :class:`Derivation` for graded
  commutative algebras, and :func:`deformed_mul` for ``a*b + lam (-1)^|a| da db``;
* :class:`ChainComplex`, :class:`GradedMap`, :func:`deformed_compose` for maps
  between complexes;
* :class:`DglaPresentation` and :class:`CoalgebraPresentation` for structures
  given by constants;
* :func:`catalog_get`, :func:`run_script` and :func:`run_suite`.
"""

from .catalog import catalog_get, catalog_names
from .coalgebra import CoalgebraPresentation, deformed_coproduct, dualize_dga
from .complexes import ChainComplex, GradedMap, deformed_compose
from .deform import DeformationConfig, deformed_mul, moyal_weyl_mul
from .dgla import DglaPresentation, deformed_bracket, exactness_check
from .errors import DeformError
from .graded import AlgebraMorphism, Derivation, Element, GradedContext
from .kernels import COMPILED
from .scalar import EPS, HBAR, I, I_HBAR, Scalar
from .script import run_script
from .suites import run_suite

__version__ = "0.1.0"

__all__ = [
    "AlgebraMorphism",
    "COMPILED",
    "ChainComplex",
    "CoalgebraPresentation",
    "DeformError",
    "DeformationConfig",
    "Derivation",
    "DglaPresentation",
    "EPS",
    "Element",
    "GradedContext",
    "GradedMap",
    "HBAR",
    "I",
    "I_HBAR",
    "Scalar",
    "catalog_get",
    "catalog_names",
    "deformed_bracket",
    "deformed_compose",
    "deformed_coproduct",
    "deformed_mul",
    "dualize_dga",
    "exactness_check",
    "moyal_weyl_mul",
    "run_script",
    "run_suite",
]
