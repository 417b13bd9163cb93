from ._hypererg import *  # noqa: F401,F403
from ._hypererg import __version__  # noqa: F401
