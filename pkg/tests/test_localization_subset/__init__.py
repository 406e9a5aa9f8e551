"""
TorsionalDI pytest functions for validation.

Subset test derived from ../test_localization.py

The full notch sweep images 48 simulated pairs on a 90 x 100 grid and pytest-xdist does
not distribute a single parametrized case well, so it was split by scatter amplitude.
"""

# Note: File is necessary for vscode to prevent a "pytest test discovery error for workspace"
