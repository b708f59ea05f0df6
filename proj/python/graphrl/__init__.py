"""GraphRL: temporal graph forecasting with a monitoring RL agent.

Thin Python wrapper around the C++ core; everything lives in the
compiled extension module.
"""

try:
    from ._graphrl import *  # noqa: F401,F403  (installed wheel layout)
    from ._graphrl import __version__  # noqa: F401
except ImportError:  # pragma: no cover - development build tree layout
    from _graphrl import *  # noqa: F401,F403
    from _graphrl import __version__  # noqa: F401
