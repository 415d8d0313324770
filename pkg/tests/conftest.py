import numpy as np
import pytest

from src.main import create_app
from src.models.matrix import BinaryPlane


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)


@pytest.fixture
def random_plane(rng):
    def make(m, n):
        return BinaryPlane(np.where(rng.random((m, n)) < 0.5, -1, 1))
    return make


@pytest.fixture
def app():
    app = create_app({
        'TESTING': True,
        'SQLALCHEMY_DATABASE_URI': 'sqlite:///:memory:',
    })
    yield app


@pytest.fixture
def client(app):
    return app.test_client()
