"""MMSE of exponential-family channels and Poincare lower bounds."""

import json

from . import _mmseb
from ._mmseb import *  # noqa: F401,F403


def verify(seed=42, sweep_seeds=1):
    """Runs every invariant suite and returns the parsed summary."""
    return json.loads(_mmseb.verify(seed, sweep_seeds))
