import json

import pytest

from ictl.fixtures import FOUR_WORLD_DOC, four_world_model


@pytest.fixture
def four_world():
    return four_world_model()


@pytest.fixture
def four_world_path(tmp_path):
    path = tmp_path / "four_world.json"
    path.write_text(json.dumps(FOUR_WORLD_DOC))
    return str(path)
