from .base import EdgeDensity
from .family1 import Family1Density, family1_moment, family1_pdf
from .family2 import Family2Density, family2_moment, family2_pdf
from .general import GeneralDensity
from .limit import LimitBetaDensity
from .ortho import (
    OrthoQuadratic,
    ortho_quadratic_canonical,
    ortho_quadratic_closed_form,
    ortho_quadratic_gram_schmidt,
    validate_user_q,
)

__all__ = [
    "EdgeDensity",
    "Family1Density",
    "Family2Density",
    "GeneralDensity",
    "LimitBetaDensity",
    "OrthoQuadratic",
    "family1_moment",
    "family1_pdf",
    "family2_moment",
    "family2_pdf",
    "ortho_quadratic_canonical",
    "ortho_quadratic_closed_form",
    "ortho_quadratic_gram_schmidt",
    "validate_user_q",
]
