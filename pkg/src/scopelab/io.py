"""
JSON state files.

Complex numbers are written as ``[re, im]`` pairs. Floats go through
Python's shortest round-trip repr, so write-then-read is bit exact.

Document kinds::

    {"kind": "pure", "dims": [2, 2], "amplitudes": [[re, im], ...]}
    {"kind": "density", "dims": [2, 2], "matrix": [[[re, im], ...], ...],
     "family_tag": {"name": ..., "params": {...}}}
    {"kind": "ensemble", "weights": [...], "locals": [[[re, im], ...] per member] per party,
     "gamma": [[re, im], ...]}
    {"kind": "scope", "coeffs": [[[re, im], ...] per party], "branch_map": [[i, j], ...]}
    {"kind": "grid", "x0": ..., "dx": ..., "samples": [[re, im], ...]}
    {"kind": "histories", "initial": <density document>,
     "steps": [{"projectors": [matrix, ...], "unitary": matrix, "channel": [matrix, ...]}]}

Matrices in ``histories`` documents and Hamiltonians may also use plain
real numbers in place of pairs.
"""

import json
from pathlib import Path

import numpy as np

from .dynamics import Channel, HistorySpec, HistoryStep, WavefunctionGrid
from .errors import ValidationError
from .states import DensityMatrix, EnsembleDecomposition, FamilyTag, PureState, ScopeDecomposition

# family-tag parameters holding complex data (vectors or lists of vectors)
_COMPLEX_KEYS = {"a", "b", "locals_a", "locals_b", "lambdas", "gamma", "members"}
_INT_KEYS = {"dims", "index", "pairing"}


def encode_complex(a):
    """Nested ``[re, im]`` lists for a complex array of any rank."""
    arr = np.asarray(a, dtype=complex)
    if arr.ndim == 0:
        z = complex(arr)
        return [z.real, z.imag]
    return [encode_complex(x) for x in arr]


def _is_pair(x) -> bool:
    return (isinstance(x, list) and len(x) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x))


def decode_complex(data, depth: int) -> np.ndarray:
    """Inverse of :func:`encode_complex` for a result of rank ``depth``.

    Plain real numbers are accepted where a pair is expected.
    """
    def walk(node, level):
        if level == 0:
            if _is_pair(node):
                return complex(float(node[0]), float(node[1]))
            if isinstance(node, (int, float)) and not isinstance(node, bool):
                return complex(float(node))
            raise ValidationError(f"expected a number or [re, im] pair, got {node!r}")
        if not isinstance(node, list):
            raise ValidationError(f"expected a list at nesting level {depth - level}")
        return [walk(x, level - 1) for x in node]

    return np.array(walk(data, depth), dtype=complex)


def _encode_param(key, value):
    if value is None or isinstance(value, (str, bool)):
        return value
    if key in _COMPLEX_KEYS:
        return encode_complex(np.asarray(value, dtype=complex))
    if key in _INT_KEYS:
        return np.asarray(value, dtype=int).tolist()
    if isinstance(value, (int, float)):
        return value
    return np.asarray(value, dtype=float).tolist()


def _as_tuples(arr):
    if arr.ndim == 1:
        return tuple(arr.tolist())
    return tuple(_as_tuples(x) for x in arr)


def _decode_param(key, value):
    if value is None or isinstance(value, (str, bool, int, float)):
        return value
    if key in _COMPLEX_KEYS:
        depth = 1
        probe = value
        while isinstance(probe, list) and probe and isinstance(probe[0], list) \
                and not _is_pair(probe[0]):
            depth += 1
            probe = probe[0]
        return _as_tuples(decode_complex(value, depth))
    if key in _INT_KEYS:
        return _as_tuples(np.asarray(value, dtype=int)) if value else ()
    return tuple(float(x) for x in value)


def encode_tag(tag):
    if tag is None:
        return None
    return {"name": tag.name, "params": {k: _encode_param(k, v) for k, v in tag.params.items()}}


def decode_tag(data):
    if data is None:
        return None
    try:
        return FamilyTag(str(data["name"]),
                         {k: _decode_param(k, v) for k, v in data.get("params", {}).items()})
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed family_tag: {exc}") from None


# ---------------------------------------------------------------------------


def to_document(obj) -> dict:
    if isinstance(obj, PureState):
        return {"kind": "pure", "dims": list(obj.dims), "amplitudes": encode_complex(obj.amplitudes)}
    if isinstance(obj, DensityMatrix):
        doc = {"kind": "density", "dims": list(obj.dims), "matrix": encode_complex(obj.matrix)}
        if obj.family_tag is not None:
            doc["family_tag"] = encode_tag(obj.family_tag)
        return doc
    if isinstance(obj, EnsembleDecomposition):
        doc = {"kind": "ensemble", "weights": list(obj.weights),
               "locals": [[encode_complex(v) for v in party] for party in obj.locals]}
        if obj.gamma is not None:
            doc["gamma"] = encode_complex(obj.gamma)
        return doc
    if isinstance(obj, ScopeDecomposition):
        doc = {"kind": "scope", "coeffs": [encode_complex(c) for c in obj.coeffs]}
        if obj.branch_map is not None:
            doc["branch_map"] = [list(b) for b in obj.branch_map]
        if obj.labels is not None:
            doc["labels"] = list(obj.labels)
        return doc
    if isinstance(obj, WavefunctionGrid):
        return {"kind": "grid", "x0": obj.x0, "dx": obj.dx, "samples": encode_complex(obj.samples)}
    if isinstance(obj, HistorySpec):
        steps = []
        for s in obj.steps:
            step = {"projectors": [encode_complex(p) for p in s.projectors]}
            if s.unitary is not None:
                step["unitary"] = encode_complex(s.unitary)
            if s.channel is not None:
                step["channel"] = [encode_complex(k) for k in s.channel.kraus]
            steps.append(step)
        return {"kind": "histories", "initial": to_document(obj.initial), "steps": steps}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_document(doc):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ValidationError("state document must be an object with a 'kind' field")
    kind = doc["kind"]
    try:
        if kind == "pure":
            return PureState(decode_complex(doc["amplitudes"], 1), tuple(doc["dims"]))
        if kind == "density":
            return DensityMatrix(decode_complex(doc["matrix"], 2), tuple(doc["dims"]),
                                 decode_tag(doc.get("family_tag")))
        if kind == "ensemble":
            gamma = doc.get("gamma")
            return EnsembleDecomposition(
                tuple(float(w) for w in doc["weights"]),
                tuple(tuple(decode_complex(v, 1) for v in party) for party in doc["locals"]),
                None if gamma is None else tuple(decode_complex(gamma, 1)),
            )
        if kind == "scope":
            bm = doc.get("branch_map")
            labels = doc.get("labels")
            return ScopeDecomposition(
                tuple(decode_complex(c, 1) for c in doc["coeffs"]),
                None if bm is None else tuple(tuple(b) for b in bm),
                None if labels is None else tuple(labels),
            )
        if kind == "grid":
            return WavefunctionGrid(decode_complex(doc["samples"], 1), float(doc["x0"]),
                                    float(doc["dx"]))
        if kind == "histories":
            initial = from_document(doc["initial"])
            if isinstance(initial, PureState):
                initial = initial.density()
            steps = []
            for s in doc["steps"]:
                channel = s.get("channel")
                steps.append(HistoryStep(
                    tuple(decode_complex(p, 2) for p in s["projectors"]),
                    None if s.get("unitary") is None else decode_complex(s["unitary"], 2),
                    None if channel is None else Channel(tuple(decode_complex(k, 2)
                                                               for k in channel)),
                ))
            return HistorySpec(initial, tuple(steps))
    except KeyError as exc:
        raise ValidationError(f"{kind} document is missing field {exc}") from None
    raise ValidationError(f"unknown state kind {kind!r}")


def dumps(obj) -> str:
    return json.dumps(to_document(obj), indent=1)


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}") from None
    return from_document(doc)


def write_state(obj, path) -> None:
    Path(path).write_text(dumps(obj) + "\n")


def read_state(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return loads(text)
