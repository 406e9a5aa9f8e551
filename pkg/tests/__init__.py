"""
TorsionalDI pytest functions for validation.
"""

# Note: File is necessary for vscode to prevent a "pytest test discovery error for workspace"
#       and lets the subset folders import the loops of their full tests.
