"""Sub-Riemannian relative heat content: exact kernels, horizontal diffusion,
grid solver, expansion predictions and sqrt(t)-fits."""

from ._subheat import *  # noqa: F401,F403
from ._subheat import __version__  # noqa: F401
