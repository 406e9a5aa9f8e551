"""
TorsionalDI pytest functions for validation.

Subset test derived from ../test_performance.py

The reference DI map takes minutes on the full 360 x 400 grid, so the compiled path is
timed at full size and the speedup is checked on a grid with a tenth of the rows and columns.
"""

# Note: File is necessary for vscode to prevent a "pytest test discovery error for workspace"
