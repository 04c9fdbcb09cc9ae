"""Collection files, ordering files and matrix images.

Collection file (JSON)::

    {"version": 1, "n": 3, "labels": ["a", "b", "c"],
     "graphs": [{"name": "g0", "edges": [[0, 1], [1, 2]], "loops": [0]}]}

Edges are listed once per unordered pair; the reader symmetrises them.
"""
from __future__ import annotations

import json
import warnings
from pathlib import Path
from typing import Union

import numpy as np

from .graph import Graph, GraphCollection, Ordering, permute_view

FORMAT_VERSION = 1


class DataError(ValueError):
    """Input data is malformed or inconsistent."""


def collection_to_dict(collection: GraphCollection) -> dict:
    graphs = []
    for g in collection:
        graphs.append({"name": g.name,
                       "edges": g.edges().tolist(),
                       "loops": g.loops().tolist()})
    return {"version": FORMAT_VERSION, "n": collection.n,
            "labels": list(collection.labels), "graphs": graphs}


def collection_from_dict(doc: dict) -> GraphCollection:
    if not isinstance(doc, dict):
        raise DataError("collection document must be a JSON object")
    version = doc.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise DataError(f"unsupported collection format version {version}")
    try:
        n = int(doc["n"])
        specs = doc["graphs"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DataError(f"collection document is missing a field: {exc}") from exc
    if n < 1:
        raise DataError("n must be positive")
    if not isinstance(specs, list) or not specs:
        raise DataError("collection must contain at least one graph")
    labels = doc.get("labels")
    graphs = []
    for gi, spec in enumerate(specs):
        name = str(spec.get("name", f"g{gi}"))
        A = np.zeros((n, n), dtype=bool)
        dupes = 0
        for e in spec.get("edges", []):
            try:
                u, v = (int(x) for x in e)
            except (TypeError, ValueError) as exc:
                raise DataError(f"graph {name!r}: bad edge {e!r}") from exc
            if not (0 <= u < n and 0 <= v < n):
                raise DataError(f"graph {name!r}: vertex index out of range in edge [{u}, {v}] (n={n})")
            if A[u, v]:
                dupes += 1
            A[u, v] = A[v, u] = True
        for u in spec.get("loops", []):
            u = int(u)
            if not 0 <= u < n:
                raise DataError(f"graph {name!r}: vertex index out of range in loop {u} (n={n})")
            if A[u, u]:
                dupes += 1
            A[u, u] = True
        if dupes:
            warnings.warn(f"graph {name!r}: {dupes} duplicate edge(s) ignored", stacklevel=2)
        graphs.append(Graph(A, name=name))
    try:
        return GraphCollection(graphs, labels)
    except ValueError as exc:
        raise DataError(str(exc)) from exc


def load_collection(path: Union[str, Path]) -> GraphCollection:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: malformed JSON ({exc})") from exc
    return collection_from_dict(doc)


def dump_collection(collection: GraphCollection) -> str:
    return json.dumps(collection_to_dict(collection), separators=(",", ":"))


def save_collection(collection: GraphCollection, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_collection(collection) + "\n")


def load_ordering(path: Union[str, Path], n: int | None = None) -> Ordering:
    """Read an ordering saved by ``order`` (``{"ordering": [...]}``) or a bare JSON list."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DataError(f"{path}: malformed JSON ({exc})") from exc
    order = doc.get("ordering") if isinstance(doc, dict) else doc
    try:
        o = Ordering(order)
    except (TypeError, ValueError) as exc:
        raise DataError(f"{path}: not a permutation ({exc})") from exc
    if n is not None and o.n != n:
        raise DataError(f"{path}: ordering has {o.n} entries, collection has {n} vertices")
    return o


# -- rendering ---------------------------------------------------------------------

def render_matrix(graph: Graph, ordering: Ordering, format: str = "pgm", scale: int = 1) -> bytes:
    """Draw the ordered adjacency matrix. Edges are black, everything else white."""
    if scale < 1:
        raise ValueError("scale must be >= 1")
    M = permute_view(graph, ordering)
    fmt = format.lower()
    if fmt == "pgm":
        img = np.where(M, 0, 255).astype(np.uint8)
        if scale > 1:
            img = np.kron(img, np.ones((scale, scale), dtype=np.uint8))
        h, w = img.shape
        return f"P5\n{w} {h}\n255\n".encode("ascii") + img.tobytes()
    if fmt == "svg":
        size = graph.n * scale
        parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
                 f'viewBox="0 0 {graph.n} {graph.n}" shape-rendering="crispEdges">',
                 f'<rect width="{graph.n}" height="{graph.n}" fill="white"/>']
        for i, j in zip(*np.nonzero(M)):
            parts.append(f'<rect x="{j}" y="{i}" width="1" height="1" fill="black"/>')
        parts.append("</svg>\n")
        return "\n".join(parts).encode("utf-8")
    raise ValueError(f"unsupported render format {format!r}; use 'pgm' or 'svg'")


def read_pgm(data: bytes) -> np.ndarray:
    """Parse a binary PGM as written by :func:`render_matrix`."""
    head, _, rest = data.partition(b"\n")
    dims, _, rest = rest.partition(b"\n")
    maxval, _, pixels = rest.partition(b"\n")
    if head != b"P5" or maxval != b"255":
        raise DataError("not an 8-bit binary PGM")
    w, h = (int(x) for x in dims.split())
    return np.frombuffer(pixels, dtype=np.uint8).reshape(h, w)
