"""Activity-tracking engine for camera-monitored walking loops.

The heavy lifting lives in the compiled ``parktrack._core`` extension; this
package re-exports its public surface.
"""

from ._core import *  # noqa: F401,F403
from ._core import __version__  # noqa: F401
