import random

import pytest

from pppca import paillier


@pytest.fixture(scope="session")
def test_keypair():
    """One 512-bit keypair shared across tests; keygen is the slow part."""
    return paillier.keygen(512, random.Random(0xFEED), allow_test_key=True)


@pytest.fixture(scope="session")
def test_keypair_1024():
    return paillier.keygen(1024, random.Random(0xBEEF))
