import pytest

from vigil.sequences import Alphabet


@pytest.fixture
def ab() -> Alphabet:
    return Alphabet(["a", "b"])
