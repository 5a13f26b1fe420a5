"""State and projector sources for the command line.

A source is either a path to a JSON matrix file or a generator spec such as
``ginibre:d=4,rank=4,seed=7``. Specs without a ``seed`` draw from the global
seed on a stream chosen by the caller, so that two unseeded specs in one
command still produce different states.
"""

import json
from pathlib import Path
from typing import Callable, Dict, Optional, Tuple

from .errors import AlphaZError, ValidationError
from .geometry import coordinate_subspace, random_subspace
from .logging_config import get_logger
from .states import (
    DensityMatrix,
    SubspaceProjector,
    density_from_spectrum,
    haar_pure_state,
    make_rng,
    matrix_from_json,
    maximally_mixed,
    random_density,
    state_from_json,
)

logger = get_logger(__name__)

STATE_GENERATORS = ("ginibre", "maxmixed", "diag", "haar-pure")
PROJECTOR_GENERATORS = ("coordinate", "haar-subspace")


def _split_spec(src: str, known: Tuple[str, ...]) -> Optional[Tuple[str, Dict[str, str]]]:
    """("ginibre", {"d": "4", ...}) for a generator spec, None for anything else."""
    kind, sep, rest = src.partition(":")
    if not sep or kind not in known:
        return None
    params: Dict[str, str] = {}
    for item in filter(None, (part.strip() for part in rest.split(","))):
        key, eq, value = item.partition("=")
        if not eq or not key or not value:
            raise ValidationError(f"malformed generator parameter '{item}' in '{src}'")
        if key in params:
            raise ValidationError(f"duplicate generator parameter '{key}' in '{src}'")
        params[key] = value
    return kind, params


def _take_int(params: Dict[str, str], key: str, src: str, default: Optional[int] = None) -> int:
    raw = params.pop(key, None)
    if raw is None:
        if default is None:
            raise ValidationError(f"generator '{src}' is missing '{key}'")
        return default
    try:
        return int(raw, 0)
    except ValueError:
        raise ValidationError(f"generator parameter '{key}' must be an integer, got '{raw}'")


def _take_list(params: Dict[str, str], key: str, src: str, cast: Callable[[str], float]) -> list:
    raw = params.pop(key, None)
    if raw is None:
        raise ValidationError(f"generator '{src}' is missing '{key}'")
    try:
        return [cast(x) for x in raw.split("/")]
    except ValueError:
        raise ValidationError(f"generator parameter '{key}' must be a '/'-separated list, got '{raw}'")


def _seed_for(params: Dict[str, str], src: str, default_seed: int, stream: int):
    if "seed" in params:
        return make_rng(_take_int(params, "seed", src))
    return make_rng(default_seed, stream)


def _reject_leftovers(params: Dict[str, str], src: str) -> None:
    if params:
        raise ValidationError(f"unknown generator parameter(s) {sorted(params)} in '{src}'")


def _load_json(src: str) -> object:
    path = Path(src)
    if not path.is_file():
        raise ValidationError(f"'{src}' is neither a readable JSON file nor a generator spec")
    try:
        with path.open("r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(f"malformed JSON in '{src}': {e.msg} at line {e.lineno}")
    except OSError as e:
        raise ValidationError(f"cannot read '{src}': {e}")


def parse_state_source(src: str, default_seed: int, stream: int = 0) -> DensityMatrix:
    """Load a density matrix from a generator spec or a JSON matrix file.

    Generators: ``ginibre:d=..,rank=..,seed=..``, ``maxmixed:d=..``,
    ``diag:p=0.7/0.3`` and ``haar-pure:d=..,seed=..``.

    Raises:
        ValidationError: malformed spec, unreadable file, or an invalid matrix.
    """
    parsed = _split_spec(src, STATE_GENERATORS)
    if parsed is None:
        logger.debug(f"Loading state from file {src}")
        return state_from_json(_load_json(src))

    kind, params = parsed
    logger.debug(f"Generating state {kind} with {params}")
    try:
        if kind == "ginibre":
            d = _take_int(params, "d", src)
            rank = _take_int(params, "rank", src, default=d)
            rng = _seed_for(params, src, default_seed, stream)
            _reject_leftovers(params, src)
            return random_density(d, rank, rng)
        if kind == "maxmixed":
            d = _take_int(params, "d", src)
            _reject_leftovers(params, src)
            return maximally_mixed(d)
        if kind == "diag":
            probs = _take_list(params, "p", src, float)
            _reject_leftovers(params, src)
            return density_from_spectrum(probs)
        d = _take_int(params, "d", src)
        rng = _seed_for(params, src, default_seed, stream)
        _reject_leftovers(params, src)
        return haar_pure_state(d, rng)
    except ValidationError:
        raise
    except AlphaZError as e:
        raise ValidationError(f"invalid generator '{src}': {e}")


def parse_projector_source(src: str, default_seed: int, stream: int = 0) -> SubspaceProjector:
    """Load a subspace projector from ``coordinate:d=..,axes=0/1``, ``haar-subspace:d=..,m=..,seed=..`` or a JSON matrix file."""
    parsed = _split_spec(src, PROJECTOR_GENERATORS)
    if parsed is None:
        logger.debug(f"Loading projector from file {src}")
        return SubspaceProjector.from_matrix(matrix_from_json(_load_json(src)))

    kind, params = parsed
    try:
        if kind == "coordinate":
            d = _take_int(params, "d", src)
            axes = [int(a) for a in _take_list(params, "axes", src, int)]
            _reject_leftovers(params, src)
            return coordinate_subspace(d, axes)
        d = _take_int(params, "d", src)
        m = _take_int(params, "m", src)
        rng = _seed_for(params, src, default_seed, stream)
        _reject_leftovers(params, src)
        return random_subspace(d, m, rng)
    except ValidationError:
        raise
    except AlphaZError as e:
        raise ValidationError(f"invalid generator '{src}': {e}")
