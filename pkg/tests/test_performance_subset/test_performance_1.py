"""
Subset test derived from test_performance.py

Speedup of the compiled DI kernel over the reference on a 36 x 40 grid.
"""

from ..test_performance import performance_loop
import pytest


@pytest.mark.subset
@pytest.mark.slow
def test_full_grid_performance():
    # loop defined in skipped test located in test_performance.py
    performance_loop(36, 40, check_reference=True)
