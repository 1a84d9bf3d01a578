# SPDX-License-Identifier: Apache-2.0
"""Multi-antenna wireless power transfer: beamforming optimizers, sensor
energy modeling, and the energy-neutral network simulator.

The heavy lifting happens in the native module; this package re-exports
its public surface.
"""

from ._wpsn import *  # noqa: F401,F403
from ._wpsn import __doc__ as _native_doc

__version__ = "0.1.0"
__doc__ = _native_doc
