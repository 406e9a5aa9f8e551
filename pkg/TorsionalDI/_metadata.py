"""
Metadata associated with the TorsionalDI package
"""

__version__ = "0.1.0"
__author__ = "TorsionalDI developers"
__credits__ = "TorsionalDI developers"
__maintainer__ = "TorsionalDI developers"
__email__ = "torsionaldi@users.noreply.github.com"
__license__ = "MIT"
__status__ = "Development"  # set to "Prototype", "Development", "Production"
__url__ = "https://github.com/torsionaldi/TorsionalDI"
__description__ = "Damage-index imaging of pipes with torsional guided waves, with a ray-based simulator."
__copyright__ = "Copyright (c) 2026 TorsionalDI developers"
