"""flagquant: Berezin quantization on generalized flag manifolds.

Modules:

* :mod:`.rootsys`  root data, Weyl group, weights, Chevalley structure constants
* :mod:`.uea`      exact PBW algebra, Harish-Chandra projection, principal symbols
* :mod:`.rep`      highest-weight representations with the contravariant form
* :mod:`.group`    compact group elements and the adjoint action
* :mod:`.orbit`    orbit map, stabilizers, Haar sampling and quadrature
* :mod:`.symbols`  s_lambda, covariant/contravariant and mixed symbols
* :mod:`.starprod` quantization maps and star products at level n
* :mod:`.suites`   verification suites (used by the CLI)
"""

__version__ = "0.1.0"

from .errors import (ConfigurationError, FlagQuantError, InvariantViolation, NotInAlgebra,  # noqa: E402
                     ResourceError, UsageError)
from .rootsys import RootDatum, Weight, build_root_system  # noqa: E402
from .uea import PBWElement, SymPolynomial  # noqa: E402
from .group import CompactGroupElement  # noqa: E402
from .rep import HighestWeightRep, Operator, build_irrep, represent  # noqa: E402
from .orbit import QuadratureSet, haar_samples, psi  # noqa: E402
from .symbols import covariant_symbol, s_lambda  # noqa: E402
from .starprod import StarLevel, quantize, star  # noqa: E402

__all__ = [
    "__version__", "FlagQuantError", "ConfigurationError", "UsageError", "ResourceError",
    "InvariantViolation", "NotInAlgebra", "RootDatum", "Weight", "build_root_system", "PBWElement",
    "SymPolynomial", "CompactGroupElement", "HighestWeightRep", "Operator", "build_irrep", "represent",
    "QuadratureSet", "haar_samples", "psi", "covariant_symbol", "s_lambda", "StarLevel", "quantize", "star",
]
