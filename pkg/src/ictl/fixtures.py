"""Bundled example model.

``FOUR_WORLD_DOC`` is a four-world model with a two-step knowledge ladder:
two base worlds joined by a transition, both sitting below a shared upper
world.  It is the canonical witness that the converse of the one-step
unfolding law for the universal until fails, which makes it the standard
regression fixture throughout the test suite.
"""

from __future__ import annotations

from .model import BirelationalModel, load_model, model_from_raw

FOUR_WORLD_DOC: dict = {
    "worlds": ["w1", "w2", "v1", "v2"],
    "preorder": [["w1", "v1"], ["w2", "v1"]],
    "transitions": [["w1", "w2"], ["w2", "w2"], ["v1", "v1"], ["v1", "v2"], ["v2", "v2"]],
    "valuation": {"w1": ["p"], "w2": ["q"], "v1": ["p", "q"], "v2": []},
}


def four_world_model() -> BirelationalModel:
    return model_from_raw(load_model(FOUR_WORLD_DOC))
