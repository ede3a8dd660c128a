"""Semi-integral points, Brauer-Manin invariants and Hasse-failure census for
Markoff orbifold pairs."""

from .arith import INF, factorize, hilbert, hensel_lift, sqrt_mod, valuation
from .brauer import build_obstructed_adele, inv_alpha, inv_alpha_i, star_condition
from .orbifold import Mode, OrbifoldPair, Weights, classify, integral_point_search
from .quadform import QuadForm, narrow_class_group, reduce
from .witness import WitnessCertificate, verify_certificate

__version__ = "0.1.0"
