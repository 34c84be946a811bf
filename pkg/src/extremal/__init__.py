"""Exact computations on smooth extremal (Hermitian) surfaces in P^3 over F_{q^2}.

Modules, bottom up: ``gf`` (field arithmetic), ``linalg`` and ``proj``
(projective geometry), ``forms`` (Frobenius forms), ``surface`` (lines and
stars), ``chords``, ``quadrics``, ``doubles``, ``autos`` and the ``cli``.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .gf import GF, FieldElem, build_field  # noqa: E402
from .surface import Surface, build_surface  # noqa: E402

__all__ = ["GF", "FieldElem", "Surface", "build_field", "build_surface", "__version__"]
