"""Canonical JSON graph documents, content hashes, and DOT export.

Documents are canonical byte-for-byte: vertices sorted by coordinates then
id, darts by (source, target), JSON emitted with sorted keys and fixed
separators.  The content hash is the sha256 of the canonical document with
the metadata hash field removed, so replayable certificates can pin the
exact graph they were computed from.
"""

from __future__ import annotations

import hashlib
import json
import os

from .graph import GkmGraph, make_graph

FORMAT = "gkm-graph/1"


class MalformedDocument(ValueError):
    pass


def graph_document(g: GkmGraph, with_hash: bool = True) -> dict:
    doc = {
        "format": FORMAT,
        "k": g.k,
        "vertices": [
            {"id": g.names[v],
             "coords": list(g.coords[v]) if g.coords[v] is not None else None}
            for v in range(g.nv)
        ],
        "darts": [
            {"id": e, "src": g.names[g.src[e]], "dst": g.names[g.dst[e]],
             "alpha": list(g.alpha[e]), "reverse": g.reverse[e]}
            for e in range(g.nd)
        ],
        "connection": None,
        "metadata": {k: v for k, v in sorted(g.metadata.items())},
    }
    if g.connection is not None:
        conn = {}
        for e in range(g.nd):
            pairs = sorted(zip(g.star[g.src[e]], g.connection[e]))
            conn[str(e)] = [[a, b] for a, b in pairs]
        doc["connection"] = conn
    if with_hash:
        doc["metadata"]["hash"] = graph_hash(g)
    return doc


def canonical_bytes(doc) -> bytes:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")).encode()


def graph_hash(g: GkmGraph) -> str:
    h = getattr(g, "_content_hash", None)
    if h is None:
        h = hashlib.sha256(canonical_bytes(graph_document(g, with_hash=False))).hexdigest()
        object.__setattr__(g, "_content_hash", h)
    return h


def save_graph(g: GkmGraph, path: str) -> None:
    write_bytes(path, canonical_bytes(graph_document(g)) + b"\n")


def write_bytes(path: str, data: bytes) -> None:
    """Write-then-rename so interruption never leaves partial output."""
    tmp = path + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, path)


def graph_from_document(doc) -> GkmGraph:
    try:
        if doc["format"] != FORMAT:
            raise MalformedDocument(f"unsupported format {doc.get('format')!r}")
        k = doc["k"]
        vertices = [(v["id"], tuple(v["coords"]) if v["coords"] is not None else None)
                    for v in doc["vertices"]]
        old = doc["darts"]
        darts = [(d["src"], d["dst"], tuple(d["alpha"])) for d in old]
        by_id = {d["id"]: d for d in old}
        if len(by_id) != len(old):
            raise MalformedDocument("duplicate dart ids")
        for d in old:
            r = by_id.get(d["reverse"])
            if r is None or r["src"] != d["dst"] or r["dst"] != d["src"]:
                raise MalformedDocument(f"broken reverse for dart {d['id']}")
        conn = None
        if doc.get("connection") is not None:
            conn = {}
            for e_str, pairs in doc["connection"].items():
                d = by_id.get(int(e_str))
                if d is None:
                    raise MalformedDocument(f"connection for unknown dart {e_str}")
                maps = []
                for a, b in pairs:
                    da, db = by_id.get(a), by_id.get(b)
                    if da is None or db is None:
                        raise MalformedDocument("connection references unknown dart")
                    maps.append(((da["src"], da["dst"]), (db["src"], db["dst"])))
                conn[(d["src"], d["dst"])] = maps
            if len(conn) != len(old):
                raise MalformedDocument("connection missing for some darts")
        meta = dict(doc.get("metadata", {}))
        meta.pop("hash", None)
        return make_graph(k, vertices, darts, connection=conn, metadata=meta)
    except MalformedDocument:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise MalformedDocument(str(exc)) from exc


def load_graph(path: str) -> GkmGraph:
    try:
        with open(path, "rb") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedDocument(str(exc)) from exc
    return graph_from_document(doc)


def export_dot(g: GkmGraph) -> str:
    """Deterministic undirected DOT with one label per edge (canonical dart)."""
    lines = ["graph gkm {"]
    for v in range(g.nv):
        lines.append(f'  "{g.names[v]}";')
    for e in range(g.nd):
        if e < g.reverse[e]:
            lab = ",".join(map(str, g.alpha[e]))
            lines.append(f'  "{g.names[g.src[e]]}" -- "{g.names[g.dst[e]]}"'
                         f' [label="({lab})"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
