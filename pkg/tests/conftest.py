import pytest

# test_localization.py and test_performance.py hold slow_skip originals; their subset packages
# test_localization_subset/ and test_performance_subset/ run the same loops in slices.


def pytest_addoption(parser: pytest.Parser):
    parser.addoption(
        "--run-slow-skip",
        action="store_true",
        help="Run the full localization and performance sweeps instead of their subsets",
    )


@pytest.hookimpl(tryfirst=True)
def pytest_collection_modifyitems(config: pytest.Config, items: list):
    if not config.getoption("--run-slow-skip"):
        return
    redundant = pytest.mark.skip(reason="--run-slow-skip runs the full sweep, subsets are redundant.")
    for item in items:
        if "slow_skip" in item.keywords:
            item.own_markers = [marker for marker in item.own_markers if marker.name not in ("skip", "skipif")]
        elif "subset" in item.keywords:
            item.add_marker(redundant)
