"""Chords, holonomy witnesses, and the negative certificates.

Two obstruction pipelines live here.  Non-extendibility: a face whose span
already has full rank and whose transversal darts are all chords carrying
holonomy witness paths (any rank-raising relabeling with the same
connection would be forced back into the face span, doubling included).
Non-realizability: an eligible face whose strict subface poset has a
reduced Euler characteristic of the forbidden sign cannot come from the
orbit space of any torus manifold with this one-skeleton.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from . import lattice, serialize
from .faces import Face, FacePoset, _close, _face_from_closure, hall_euler
from .graph import GkmGraph, congruence_constants, holonomy, independence_level


@dataclass
class ChordReport:
    face: Face
    chords: tuple[int, ...]        # transversal darts with both ends in the face
    non_chords: tuple[int, ...]

    @property
    def chord_edge_count(self) -> int:
        return len(self.chords) // 2


def chords(g: GkmGraph, face: Face) -> ChordReport:
    """Classify every transversal dart at the face's vertices."""
    vset = set(face.vertices)
    dset = set(face.darts)
    inside, outside = [], []
    for v in face.vertices:
        for e in g.star[v]:
            if e in dset:
                continue
            (inside if g.dst[e] in vset else outside).append(e)
    return ChordReport(face, tuple(sorted(inside)), tuple(sorted(outside)))


@dataclass
class ChordlessReport:
    level: int
    precondition_met: bool
    independence: int
    violations: tuple[tuple[Face, tuple[int, ...]], ...]

    @property
    def ok(self) -> bool:
        return self.precondition_met and not self.violations


def verify_chordless(g: GkmGraph, poset: FacePoset, j: int) -> ChordlessReport:
    """Check that every face of dimension <= j is chordless.

    Sound only under (j+2)-independence; a lower independence level is
    reported as an unmet precondition rather than evaluated.
    """
    indep = independence_level(g)
    if indep < j + 2:
        return ChordlessReport(j, False, indep, ())
    bad = []
    for f in poset.faces:
        if 1 <= f.dim <= j:
            rep = chords(g, f)
            if rep.chords:
                bad.append((f, rep.chords))
    return ChordlessReport(j, True, indep, tuple(bad))


def chord_witness(g: GkmGraph, face: Face, e: int,
                  max_len: int | None = None) -> tuple[int, ...] | None:
    """Shortest edge path in the face from i(e) to t(e) transporting e to
    its reverse; breadth-first, so deterministic.  None when no path within
    the length bound exists (reported as inconclusive, never as a negative).
    """
    vset = set(face.vertices)
    dset = set(face.darts)
    if g.src[e] not in vset or g.dst[e] not in vset or e in dset:
        raise ValueError("dart is not a chord of the face")
    if max_len is None:
        max_len = 2 * len(face.vertices)
    goal = (g.dst[e], g.reverse[e])
    start = (g.src[e], e)
    if start == goal:
        return ()
    parent = {start: None}
    frontier = deque([(start, 0)])
    while frontier:
        (v, carried), depth = frontier.popleft()
        if depth >= max_len:
            continue
        for step in g.star[v]:
            if step not in dset:
                continue
            state = (g.dst[step], g.nabla(step, carried))
            if state in parent:
                continue
            parent[state] = ((v, carried), step)
            if state == goal:
                path = []
                cur = state
                while parent[cur] is not None:
                    prev, used = parent[cur]
                    path.append(used)
                    cur = prev
                return tuple(reversed(path))
            frontier.append((state, depth + 1))
    return None


# ---------------------------------------------------------------------------
# Non-extendibility certificates
# ---------------------------------------------------------------------------

SOUNDNESS_NOTE = (
    "For any axial relabeling of this graph with the same connection, the "
    "congruence constants are forced to agree with the recorded ones; each "
    "witness path then forces twice the label of its transversal dart into "
    "the span of the face labels, so the total rank cannot exceed the face "
    "rank.")


@dataclass
class NonextendibilityCertificate:
    graph_hash: str
    k: int
    face: Face
    witnesses: dict[int, tuple[int, ...]]
    note: str = SOUNDNESS_NOTE

    def to_document(self) -> dict:
        return {
            "format": "gkm-nonextendibility/1",
            "graph_hash": self.graph_hash,
            "k": self.k,
            "face_darts": list(self.face.darts),
            "witnesses": {str(e): list(p) for e, p in sorted(self.witnesses.items())},
            "note": self.note,
        }


@dataclass
class CertificateSearch:
    certificate: NonextendibilityCertificate | None
    reason: str

    @property
    def found(self) -> bool:
        return self.certificate is not None


def faces_of_dimension(g: GkmGraph, dim: int):
    """All faces of one dimension, by closing every size-dim star seed."""
    from itertools import combinations
    found = {}
    seen = set()
    for v in range(g.nv):
        for seed in combinations(g.star[v], dim):
            key = (v, frozenset(seed))
            if key in seen:
                continue
            seen.add(key)
            got = _close(g, seed, bound=dim)
            if got is None:
                continue
            dset, local = got
            face = _face_from_closure(g, dset, local)
            if face is None or face.dim != dim:
                continue
            for u, st in local.items():
                seen.add((u, frozenset(st)))
            found[face.key] = face
    return [found[k] for k in sorted(found)]


def nonextendibility_certificate(g: GkmGraph,
                                 poset: FacePoset | None = None) -> CertificateSearch:
    """Search for a full-rank face all of whose transversal darts are chords
    with holonomy witnesses; emit a replayable certificate on success.
    """
    k = g.k
    n = max(g.valences)
    if poset is not None:
        if poset.max_dim < k:
            raise ValueError("poset does not cover dimension k")
        candidates = poset.of_dim(k)
    else:
        candidates = faces_of_dimension(g, k)
    if n == k:
        return CertificateSearch(None, "graph has n = k (complexity zero); "
                                 "no higher-rank relabeling is possible")
    for face in sorted(candidates, key=lambda f: f.key):
        if len(face.span) != k:
            continue
        rep = chords(g, face)
        if rep.non_chords or not rep.chords:
            continue
        witnesses = {}
        ok = True
        for e in rep.chords:
            path = chord_witness(g, face, e)
            if path is None:
                ok = False
                break
            witnesses[e] = path
        if ok:
            cert = NonextendibilityCertificate(serialize.graph_hash(g), k,
                                               face, witnesses)
            return CertificateSearch(cert, "certificate found")
    return CertificateSearch(None, "no full-rank face with all-chord "
                             "transversals and witnesses")


def verify_certificate(g: GkmGraph, doc) -> tuple[bool, list[str]]:
    """Replay a serialized certificate against a graph, from scratch."""
    issues = []
    if doc.get("format") != "gkm-nonextendibility/1":
        return False, ["unrecognized certificate format"]
    if doc.get("graph_hash") != serialize.graph_hash(g):
        issues.append("graph content hash does not match")
    k = doc.get("k")
    if k != g.k:
        issues.append(f"certificate rank {k} != graph rank {g.k}")
    dset = set(doc.get("face_darts", ()))
    if not dset:
        return False, issues + ["empty face"]
    verts = sorted({g.src[e] for e in dset})
    # the face must be connection-closed, k-regular, and of full span rank
    got = _close(g, [e for e in g.star[verts[0]] if e in dset])
    if got is None or got[0] != dset:
        issues.append("face darts are not a connection closure")
    else:
        face = _face_from_closure(g, *got)
        if face is None or face.dim != k:
            issues.append("face is not k-regular")
        elif len(face.span) != k:
            issues.append("face span does not have full rank")
    vset = set(verts)
    witnesses = {int(e): tuple(p) for e, p in doc.get("witnesses", {}).items()}
    for v in verts:
        for e in g.star[v]:
            if e in dset:
                continue
            if g.dst[e] not in vset:
                issues.append(f"transversal dart {g.dart_repr(e)} is not a chord")
                continue
            path = witnesses.get(e)
            if path is None:
                issues.append(f"no witness for {g.dart_repr(e)}")
                continue
            if any(step not in dset for step in path):
                issues.append(f"witness for {g.dart_repr(e)} leaves the face")
                continue
            if path and g.src[path[0]] != g.src[e]:
                issues.append(f"witness for {g.dart_repr(e)} starts elsewhere")
                continue
            end = g.dst[path[-1]] if path else g.src[e]
            if end != g.dst[e]:
                issues.append(f"witness for {g.dart_repr(e)} ends elsewhere")
                continue
            if holonomy(g, path, e) != g.reverse[e]:
                issues.append(f"witness for {g.dart_repr(e)} does not reverse it")
                continue
            span_gens = [g.alpha[x] for x in g.star[verts[0]] if x in dset]
            if not lattice.span_contains(span_gens,
                                         tuple(2 * x for x in g.alpha[e])):
                issues.append(f"doubled label of {g.dart_repr(e)} escapes the span")
    return not issues, issues


# ---------------------------------------------------------------------------
# Extension space
# ---------------------------------------------------------------------------

@dataclass
class ExtensionSpace:
    dimension: int
    basis: tuple[tuple[Fraction, ...], ...]   # per-dart values, one row per basis vector


def extension_space(g: GkmGraph) -> ExtensionSpace:
    """Rational solution space of the congruence system for one extra label
    coordinate.  Dimension k means only projections of the existing labels
    solve it, i.e. no nontrivial extension exists over the rationals.

    A solution is determined by its values on one star: crossing any dart
    transports the whole star by the congruence constants.  Every re-derived
    value yields a consistency equation in the base-star unknowns.
    """
    consts = congruence_constants(g)
    n = max(g.valences)
    base = 0
    zero = (0,) * n
    expr: list[tuple[int, ...] | None] = [None] * g.nd
    for i, e in enumerate(g.star[base]):
        expr[e] = tuple(1 if j == i else 0 for j in range(n))
    equations: set[tuple[int, ...]] = set()
    seen = {base}
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for e in g.star[u]:
            w = g.dst[e]
            fresh = w not in seen
            for ep in g.star[u]:
                f = g.nabla(e, ep)
                val = tuple(x + consts[(e, ep)] * y
                            for x, y in zip(expr[ep], expr[e]))
                if expr[f] is None:
                    expr[f] = val
                else:
                    diff = tuple(x - y for x, y in zip(expr[f], val))
                    if diff != zero:
                        equations.add(diff)
            if fresh:
                seen.add(w)
                queue.append(w)
    kernel = _rational_kernel(sorted(equations), n)
    basis = tuple(tuple(sum(Fraction(c) * x for c, x in zip(expr[e], vec))
                        for e in range(g.nd))
                  for vec in kernel)
    return ExtensionSpace(len(kernel), basis)


def _rational_kernel(rows, n):
    """Kernel basis of an integer matrix over Q (returned as Fractions)."""
    mat = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(mat)) if mat[i][c]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        pv = mat[r][c]
        mat[r] = [x / pv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c]:
                f = mat[i][c]
                mat[i] = [x - f * y for x, y in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    out = []
    for c in free:
        vec = [Fraction(0)] * n
        vec[c] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][c]
        out.append(tuple(vec))
    return out


# ---------------------------------------------------------------------------
# Realizability obstruction
# ---------------------------------------------------------------------------

@dataclass
class RealizabilityObstruction:
    face: Face
    dim: int
    euler: int
    required: str
    obstructed: bool


def realizability_check(g: GkmGraph, poset: FacePoset):
    """Euler-characteristic sign test on every eligible face.

    A face of dimension q with full-rank span is eligible when the graph is
    (q+1)-independent (its subface poset then transfers to the orbit space
    of any realizing manifold), and the whole graph is eligible when it is
    an n-independent torus graph (n = k).  Realizability forces the reduced
    Euler characteristic of the strict subface poset to vanish or carry
    sign (-1)^(q-1); the opposite sign is an obstruction.
    """
    indep = independence_level(g)
    n = max(g.valences)
    out = []
    for face in poset.faces:
        q = face.dim
        if q < 2:
            continue
        if lattice.rank(face.span) != q:
            continue
        whole = len(face.vertices) == g.nv and len(face.darts) == g.nd
        if not (q + 1 <= indep or (whole and n == g.k == q and indep == q)):
            continue
        chi = hall_euler(poset, face)
        required = f"0 or sign {'+' if (q - 1) % 2 == 0 else '-'}"
        bad_sign = 1 if q % 2 == 0 else -1
        obstructed = chi != 0 and (chi > 0) == (bad_sign > 0)
        out.append(RealizabilityObstruction(face, q, chi, required, obstructed))
    return out
