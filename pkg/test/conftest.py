import pytest

def pytest_addoption(parser):
    parser.addoption(
        "--full", action="store_true", default=False, help="run the acceptance tests at full trial counts"
        )

def pytest_configure(config):
    config.addinivalue_line("markers", "full_acceptance: mark test as a full-size acceptance test")

def pytest_collection_modifyitems(config, items):
    if config.getoption("--full"):
        # --full given in cli: do not skip full-size acceptance tests
        return
    skip_full_acceptance = pytest.mark.skip(reason="need --full option to run")
    for item in items:
        if "full_acceptance" in item.keywords:
            item.add_marker(skip_full_acceptance)

@pytest.fixture
def trials(request):
    """
    Returns a function mapping a full acceptance trial count onto the count
    to run: unchanged with --full, `quick` otherwise
    """
    full = request.config.getoption("--full")
    def n_trials(full_count, quick=20):
        return full_count if full else min(full_count, quick)
    return n_trials

@pytest.fixture
def rng():
    import numpy as np
    return np.random.default_rng(1001)
