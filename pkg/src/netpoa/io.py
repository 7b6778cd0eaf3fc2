"""JSON file formats. Agent and class numbers in files are 1-based."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .mechanisms import BasisFunction, Mechanism, MechanismError, basis_power, basis_set_covering
from .network import ClassPartition, InformationNetwork, NetworkError, validate_network


class InputError(ValueError):
    """Unreadable or malformed input file."""


def load_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"{path}: {e.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None


def network_from_json(data) -> InformationNetwork:
    if not isinstance(data, dict) or "obs" not in data:
        raise InputError('network JSON needs an "obs" list')
    obs = data["obs"]
    if not isinstance(obs, list) or not all(isinstance(o, list) for o in obs):
        raise InputError('"obs" must be a list of agent lists')
    n = data.get("n", len(obs))
    if n != len(obs):
        raise InputError(f'"n" is {n} but "obs" lists {len(obs)} agents')
    zero_based = []
    for i, o in enumerate(obs):
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in o):
            raise InputError(f"agent {i + 1}: observation list must hold integers")
        zero_based.append({v - 1 for v in o})
    try:
        return validate_network(zero_based)
    except NetworkError as e:
        raise InputError(str(e)) from None


def network_to_json(net: InformationNetwork) -> dict:
    return {"n": net.n, "obs": [sorted(v + 1 for v in o) for o in net.obs]}


def partition_to_json(part: ClassPartition) -> dict:
    return {
        "classes": [sorted(i + 1 for i in c) for c in part.classes],
        "obs_classes": [sorted(j + 1 for j in o) for o in part.obs_classes],
    }


def partition_from_json(data) -> ClassPartition:
    try:
        classes = [frozenset(i - 1 for i in c) for c in data["classes"]]
        obs = [frozenset(j - 1 for j in o) for o in data["obs_classes"]]
        return ClassPartition(tuple(classes), tuple(obs))
    except (KeyError, TypeError) as e:
        raise InputError(f"bad partition JSON: {e}") from None
    except NetworkError as e:
        raise InputError(str(e)) from None


def mechanism_to_json(f: Mechanism) -> dict:
    return {"per_class": [t.tolist() for t in f.per_class]}


def mechanism_from_json(data) -> Mechanism:
    if not isinstance(data, dict) or "per_class" not in data:
        raise InputError('mechanism JSON needs a "per_class" list')
    try:
        return Mechanism(tuple(np.asarray(t, dtype=float) for t in data["per_class"]))
    except (TypeError, ValueError) as e:
        raise InputError(f"bad mechanism JSON: {e}") from None


def basis_to_json(w: BasisFunction) -> dict:
    return {"values": w.values.tolist()}


def basis_from_json(data) -> BasisFunction:
    if not isinstance(data, dict) or "values" not in data:
        raise InputError('basis JSON needs a "values" list')
    try:
        return BasisFunction(np.asarray(data["values"], dtype=float))
    except (TypeError, ValueError) as e:
        raise InputError(f"bad basis JSON: {e}") from None


def parse_basis(spec: str, n: int) -> BasisFunction:
    """``setcover`` | ``power:<d>`` | ``file:<path>``."""
    try:
        if spec == "setcover":
            return basis_set_covering(n)
        if spec.startswith("power:"):
            return basis_power(n, float(spec.split(":", 1)[1]))
        if spec.startswith("file:"):
            w = basis_from_json(load_json(spec.split(":", 1)[1]))
            if w.n < n:
                raise InputError(f"basis file covers {w.n} agents, need {n}")
            return w
    except (ValueError, MechanismError) as e:
        raise InputError(f"bad basis spec {spec!r}: {e}") from None
    raise InputError(f"unknown basis spec {spec!r}; use setcover, power:<d> or file:<path>")
