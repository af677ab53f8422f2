"""Input coercion shared by the estimator and the CLI."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .exceptions import InvalidInput
from .game import BuildingPosition, GameParams, canonicalize, parse_building_position
from .solver import RULES


def check_rule(rule: str) -> str:
    if rule not in RULES:
        raise InvalidInput(f"rule must be one of {RULES}, got {rule!r}")
    return rule


def check_params(n_tokens, n_stacks) -> GameParams:
    try:
        n, l = int(n_tokens), int(n_stacks)
    except (TypeError, ValueError):
        raise InvalidInput(f"token and stack counts must be integers, got {n_tokens!r}, {n_stacks!r}") from None
    return GameParams(n, l)


def check_positions(X, params: GameParams) -> list[BuildingPosition]:
    """Coerce ``X`` into building positions of ``params``.

    Accepted forms: a single position or string, an iterable of
    :class:`BuildingPosition` / ``"h1,...,hl;ξ=r"`` strings, or a 2-D integer
    array whose rows are ``l`` heights followed by the remaining count. Array
    rows may be unsorted; they are canonicalised.
    """
    if isinstance(X, (BuildingPosition, str)):
        X = [X]
    if isinstance(X, np.ndarray) or (isinstance(X, list) and X and isinstance(X[0], (list, tuple))):
        arr = np.asarray(X)
        if arr.ndim != 2 or arr.shape[1] != params.n_stacks + 1:
            raise InvalidInput(f"expected rows of {params.n_stacks} heights plus the remaining count, got shape {arr.shape}")
        if not np.issubdtype(arr.dtype, np.integer):
            raise InvalidInput(f"position arrays must be integer, got {arr.dtype}")
        out = [BuildingPosition(canonicalize(row[:-1]), int(row[-1])) for row in arr.tolist()]
    else:
        out = [x if isinstance(x, BuildingPosition) else parse_building_position(str(x)) for x in _iter(X)]
    for b in out:
        if b.params != params:
            raise InvalidInput(f"{b} does not belong to BN({params.n_tokens},{params.n_stacks})")
    return out


def _iter(X) -> Iterable:
    try:
        return iter(X)
    except TypeError:
        raise InvalidInput(f"cannot read positions from {type(X).__name__}") from None
