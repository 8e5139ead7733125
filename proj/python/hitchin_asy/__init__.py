"""Asymptotic geometry of rank-two irregular Higgs-bundle moduli.

Thin Python layer over the C++ core: special functions, spectral data,
Painleve fiducial profiles, gluing-error norms, and the nine
four-dimensional case studies.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
