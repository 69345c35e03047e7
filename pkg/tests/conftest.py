"""
Test configuration and shared fixtures for HeartPath
"""
import sys
import pytest
import tempfile
import logging
from pathlib import Path

import numpy as np

# Add project root to path to ensure imports work correctly
sys.path.insert(0, str(Path(__file__).parent.parent))

from models.config_management import ConfigManager
from models.core.sequences import validate_probability_matrix, CyclicTransitionModel


# Configure logging for tests
@pytest.fixture(scope="session", autouse=True)
def configure_test_logging():
    """Configure logging for tests"""
    logging.basicConfig(
        level=logging.DEBUG,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler()
        ]
    )
    # Quiet third-party debug output
    logging.getLogger('matplotlib').setLevel(logging.WARNING)
    logger = logging.getLogger('test')
    return logger


@pytest.fixture
def temp_dir():
    """Create a temporary directory for tests"""
    with tempfile.TemporaryDirectory() as tmpdirname:
        yield Path(tmpdirname)


@pytest.fixture
def config_manager(temp_dir, monkeypatch):
    """ConfigManager rooted in a temporary directory, free of HEARTPATH_* overrides"""
    for var in ('HEARTPATH_LOG_LEVEL', 'HEARTPATH_WORKERS', 'HEARTPATH_TOLERANCE_MS', 'HEARTPATH_RATE_HZ'):
        monkeypatch.delenv(var, raising=False)
    manager = ConfigManager(temp_dir)
    manager.config = manager.DEFAULT_CONFIG.model_copy(deep=True)
    manager.config.output.corpus_dir = str(temp_dir / 'corpus')
    return manager


@pytest.fixture
def rng():
    """Seeded generator for randomized tests"""
    return np.random.default_rng(20200611)


@pytest.fixture
def example_3x3():
    """Three samples over three states; argmax is [0, 1, 2]"""
    return validate_probability_matrix([[0.5, 0.3, 0.2], [0.1, 0.7, 0.2], [0.3, 0.3, 0.4]], rate_hz=50)


@pytest.fixture
def invalid_argmax_3x3():
    """Argmax [0, 2, 0] skips a state; the constrained optimum is [1, 2, 0]"""
    return validate_probability_matrix([[0.6, 0.2, 0.2], [0.1, 0.2, 0.7], [0.5, 0.3, 0.2]], rate_hz=50)


@pytest.fixture
def window_5x2():
    """Best two-sample window starts at 1 (tied with 2 at 1.7)"""
    return validate_probability_matrix(
        [[0.5, 0.5], [0.1, 0.9], [0.2, 0.8], [0.9, 0.1], [0.5, 0.5]], rate_hz=50
    )


@pytest.fixture
def model3():
    return CyclicTransitionModel(3)


@pytest.fixture
def model2():
    return CyclicTransitionModel(2)
