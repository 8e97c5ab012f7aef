"""Finite weighted oriented simplicial complexes.

A face is a strictly ascending tuple of nonnegative vertex ids; the ascending
order is the canonical orientation. The empty tuple is the (-1)-face and is
only present when the complex is *reduced*.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator
from itertools import combinations

Face = tuple[int, ...]
EMPTY: Face = ()

POLICIES = ("unit", "explicit", "normalized")
MODES = ("strict", "auto-close")


class ComplexError(ValueError):
    """Invalid complex input: closure, weights, duplicates, unknown faces."""


def as_face(vertices: Iterable[int]) -> Face:
    """Canonicalize a vertex collection into a face (ascending tuple)."""
    raw = list(vertices)
    out = []
    for v in raw:
        if isinstance(v, bool) or not isinstance(v, (int,)) and not hasattr(v, "__index__"):
            raise ComplexError(f"vertex ids must be integers, got {v!r} in {raw}")
        v = int(v)
        if v < 0:
            raise ComplexError(f"vertex ids must be nonnegative, got {v} in {raw}")
        out.append(v)
    face = tuple(sorted(out))
    if len(set(face)) != len(face):
        raise ComplexError(f"duplicate vertex in face {raw}")
    return face


def face_label(face: Face) -> str:
    return "{" + ",".join(str(v) for v in face) + "}"


def boundary(face: Face) -> list[tuple[int, Face]]:
    """Signed codimension-one faces of ``face``: pairs ((-1)**k, face minus v_k)."""
    return [(-1 if k % 2 else 1, face[:k] + face[k + 1:]) for k in range(len(face))]


def sign(face: Face, coface: Face) -> int:
    """Incidence sign of ``face`` in the boundary of ``coface``.

    Returns ``(-1)**k`` when ``face`` is ``coface`` with its k-th vertex
    removed, else 0.
    """
    if len(face) + 1 != len(coface):
        return 0
    for k in range(len(coface)):
        if coface[:k] + coface[k + 1:] == face:
            return -1 if k % 2 else 1
    return 0


def _check_weight(face: Face, weight) -> float:
    if isinstance(weight, bool):
        raise ComplexError(f"weight of face {face_label(face)} must be a number, got {weight!r}")
    try:
        value = float(weight)
    except (TypeError, ValueError):
        raise ComplexError(f"weight of face {face_label(face)} must be a number, got {weight!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise ComplexError(f"weight of face {face_label(face)} must be finite and positive, got {weight!r}")
    return value


class WeightedComplex:
    """Immutable weighted simplicial complex closed under inclusion.

    Use :func:`build_complex` to construct one from user input; the
    constructor assumes a closed face set with validated weights.
    """

    def __init__(self, weights: dict[Face, float], reduced: bool = True, name: str = ""):
        self.name = name
        self.reduced = bool(reduced)
        faces = sorted((f for f in weights if f or self.reduced), key=lambda f: (len(f), f))
        if self.reduced and EMPTY not in weights:
            raise ComplexError("reduced complex requires a weight for the empty face")
        by_dim: dict[int, list[Face]] = {}
        for f in faces:
            by_dim.setdefault(len(f) - 1, []).append(f)
        self._faces = {d: tuple(fs) for d, fs in by_dim.items()}
        self._weights = {f: float(weights[f]) for f in faces}
        self._index = {}
        for fs in self._faces.values():
            for k, f in enumerate(fs):
                self._index[f] = k
        cof: dict[Face, list[Face]] = {f: [] for f in faces}
        for f in faces:
            if len(f) <= 1 and not self.reduced:
                continue
            for _, e in boundary(f):
                if e not in cof:
                    raise ComplexError(f"face {face_label(f)} is missing sub-face {face_label(e)}")
                cof[e].append(f)
        self._cofaces = {f: tuple(c) for f, c in cof.items()}
        self.dim = max((d for d in self._faces if d >= 0), default=-1)

    def __repr__(self) -> str:
        counts = [self.n_faces(i) for i in range(-1, self.dim + 1)]
        return f"WeightedComplex(name={self.name!r}, reduced={self.reduced}, f-vector={counts})"

    def __contains__(self, face) -> bool:
        return face in self._weights

    def __len__(self) -> int:
        return len(self._weights)

    def __iter__(self) -> Iterator[Face]:
        for d in sorted(self._faces):
            yield from self._faces[d]

    def faces(self, i: int) -> tuple[Face, ...]:
        return self._faces.get(i, ())

    def n_faces(self, i: int) -> int:
        return len(self._faces.get(i, ()))

    def index(self, face: Face) -> int:
        try:
            return self._index[face]
        except KeyError:
            raise ComplexError(f"face {face_label(face)} is not in the complex") from None

    def weight(self, face: Face) -> float:
        try:
            return self._weights[face]
        except KeyError:
            raise ComplexError(f"face {face_label(face)} is not in the complex") from None

    def weights(self, i: int):
        import numpy as np

        return np.array([self._weights[f] for f in self.faces(i)], dtype=float)

    def weight_map(self) -> dict[Face, float]:
        return dict(self._weights)

    def cofaces(self, face: Face) -> tuple[Face, ...]:
        """Faces one dimension up having ``face`` in their boundary."""
        if face not in self._cofaces:
            raise ComplexError(f"face {face_label(face)} is not in the complex")
        return self._cofaces[face]

    def boundary(self, face: Face) -> list[tuple[int, Face]]:
        """Signed boundary faces present in this complex (the empty face only if reduced)."""
        if len(face) == 1 and not self.reduced:
            return []
        return boundary(face)

    def degree(self, face: Face) -> float:
        """Sum of the weights of the cofaces of ``face``."""
        return math.fsum(self._weights[c] for c in self.cofaces(face))

    def facets(self) -> list[Face]:
        return [f for f in self if f and not self._cofaces[f]]

    def coface_pairs(self, i: int) -> Iterator[tuple[Face, Face, Face, str]]:
        """Unordered pairs of distinct i-faces with the face they share.

        Up-pairs (shared (i+1)-coface) come first, ordered by coface index, then
        down-pairs (shared (i-1)-face), ordered by that face's index.
        """
        if i < 0 or i > self.dim:
            raise ComplexError(f"dimension {i} out of range 0..{self.dim}")
        for top in self.faces(i + 1):
            subs = [e for _, e in boundary(top)]
            subs.sort(key=self._index.__getitem__)
            for a, b in combinations(subs, 2):
                yield a, b, top, "up"
        for low in self.faces(i - 1):
            for a, b in combinations(self._cofaces[low], 2):
                yield a, b, low, "down"

    def summary(self) -> dict:
        return {
            "name": self.name,
            "reduced": self.reduced,
            "dim": self.dim,
            "f_vector": {str(i): self.n_faces(i) for i in range(-1, self.dim + 1)},
            "n_faces": len(self),
        }


def _parse_entry(entry) -> tuple[Face, object]:
    if isinstance(entry, dict):
        return as_face(entry["vertices"]), entry.get("weight")
    items = list(entry)
    if len(items) == 2 and not isinstance(items[0], (int,)) and hasattr(items[0], "__iter__"):
        return as_face(items[0]), items[1]
    return as_face(items), None


def build_complex(
    entries: Iterable,
    policy: str = "unit",
    mode: str = "auto-close",
    reduced: bool = True,
    name: str = "",
) -> WeightedComplex:
    """Build a :class:`WeightedComplex` from faces with optional weights.

    Each entry is a vertex collection, a ``(vertices, weight)`` pair, or a
    mapping with ``vertices`` and optional ``weight`` keys.

    Weight policies:

    * ``unit``: every face weighs 1; supplying a weight is an error.
    * ``explicit``: every nonempty face needs a weight; the empty face
      defaults to 1.
    * ``normalized``: facets keep their given weight (default 1); every
      other face, the empty face included, gets its degree, top-down.
    """
    if policy not in POLICIES:
        raise ComplexError(f"unknown weight policy {policy!r}; expected one of {POLICIES}")
    if mode not in MODES:
        raise ComplexError(f"unknown mode {mode!r}; expected one of {MODES}")

    given: dict[Face, object] = {}
    for entry in entries:
        face, weight = _parse_entry(entry)
        if face in given:
            raise ComplexError(f"duplicate face entry {face_label(face)}")
        if face == EMPTY and not reduced:
            raise ComplexError("empty face given for a non-reduced complex")
        given[face] = weight

    if mode == "strict":
        for face in given:
            if len(face) < 2:
                continue
            for _, sub in boundary(face):
                if sub not in given:
                    raise ComplexError(
                        f"closure violation: {face_label(sub)} (sub-face of {face_label(face)}) is missing"
                    )
        closed = set(given)
    else:
        closed = set()
        for face in given:
            if face in closed:
                continue
            for k in range(1, len(face) + 1):
                closed.update(combinations(face, k))
    closed.discard(EMPTY)
    if reduced:
        closed.add(EMPTY)

    weights: dict[Face, float] = {}
    if policy == "unit":
        for face, w in given.items():
            if w is not None:
                raise ComplexError(f"weight given for face {face_label(face)} under the unit policy")
        weights = {f: 1.0 for f in closed}
    elif policy == "explicit":
        for face in closed:
            w = given.get(face)
            if w is None:
                if face == EMPTY:
                    weights[face] = 1.0
                    continue
                raise ComplexError(f"missing weight for face {face_label(face)} under the explicit policy")
            weights[face] = _check_weight(face, w)
    else:
        top = max((len(f) for f in closed), default=0)
        by_len: dict[int, list[Face]] = {}
        for f in closed:
            by_len.setdefault(len(f), []).append(f)
        cof: dict[Face, list[Face]] = {f: [] for f in closed}
        for f in closed:
            if f:
                for _, e in boundary(f):
                    if e in cof:
                        cof[e].append(f)
        for length in range(top, -1, -1):
            for f in sorted(by_len.get(length, ())):
                w = given.get(f)
                if cof[f]:
                    if w is not None:
                        raise ComplexError(
                            f"weight given for non-facet {face_label(f)} under the normalized policy"
                        )
                    weights[f] = math.fsum(weights[c] for c in cof[f])
                else:
                    weights[f] = 1.0 if w is None else _check_weight(f, w)
    return WeightedComplex(weights, reduced=reduced, name=name)
