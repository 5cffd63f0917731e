"""Exact symbolic engine for quantized function algebras.

Everything is computed over Q(v) with q = v**2: presentations of the
quantized algebras, rewriting to normal form, Koszul-type complexes,
Ore localization and growth estimates for filtered modules.
"""

from .scalar import (
    Scalar,
    PoleError,
    ParseError,
    ZERO,
    ONE,
    V,
    Q,
    from_int,
    from_fraction,
    v_power,
    q_power,
    bracket,
    specialize,
    parse_scalar,
)

__version__ = "0.1.0"
