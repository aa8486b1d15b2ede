"""Numerical laboratory for coercive inequalities on metric measure spaces.

Thin wrapper over the C++ core: Heisenberg-group geometry, Gibbs measures,
Monte Carlo functionals, inequality checkers, and the two counterexample
constructions.
"""

try:
    from ._uboundlab import *  # noqa: F401,F403
    from ._uboundlab import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension next to the package dir
    from _uboundlab import *  # noqa: F401,F403
    from _uboundlab import __version__  # noqa: F401
