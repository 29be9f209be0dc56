"""Faces of a GKM graph and the combinatorics built on them.

A face is a connected r-regular subgraph closed under the connection; zero
dimensional faces are the vertices and the whole graph is the top face.
This module computes connection closures, enumerates all faces into a
poset, measures completeness, extracts intervals, checks the simplicial
property of lower op-intervals, evaluates the Hall Euler characteristic
from face numbers, and builds order complexes with their integral homology.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from . import lattice, serialize
from .graph import GkmGraph


@dataclass(frozen=True)
class Face:
    graph_hash: str
    vertices: tuple[int, ...]
    darts: tuple[int, ...]
    dim: int
    span: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "_vset", frozenset(self.vertices))
        object.__setattr__(self, "_dset", frozenset(self.darts))

    def contains(self, other: "Face") -> bool:
        return other._vset <= self._vset and other._dset <= self._dset

    @property
    def key(self):
        return (self.dim, self.vertices, self.darts)

    def star_at(self, g: GkmGraph, v: int) -> tuple[int, ...]:
        return tuple(e for e in g.star[v] if e in self._dset)


@dataclass
class ClosureReport:
    """Closure of a seed that grew beyond |seed|-regularity."""
    seed: tuple[int, ...]
    darts: tuple[int, ...]
    star_sizes: dict[int, int]


class BudgetExceeded(RuntimeError):
    pass


def _close(g: GkmGraph, seed, bound: int | None = None):
    """Least connection-closed dart set containing the seed.

    With `bound` set, gives up early as soon as some star exceeds it
    (closures only grow, so the seed can never yield a bound-regular face).
    Returns (dart set, per-vertex star lists) or None when aborted.
    """
    dset: set[int] = set()
    local: dict[int, list[int]] = {}
    queue: deque[int] = deque()

    def add(f):
        if f not in dset:
            dset.add(f)
            queue.append(f)

    for s in seed:
        add(s)
    while queue:
        f = queue.popleft()
        u = g.src[f]
        here = local.setdefault(u, [])
        for e in here:
            add(g.nabla(e, f))
            add(g.nabla(f, e))
        add(g.nabla(f, f))
        here.append(f)
        if bound is not None and len(here) > bound:
            return None
    return dset, local


def _face_from_closure(g: GkmGraph, dset, local) -> Face | None:
    sizes = {len(st) for st in local.values()}
    if len(sizes) != 1:
        return None
    dim = sizes.pop()
    verts = tuple(sorted(local))
    v0 = verts[0]
    span = lattice.hermite_basis([g.alpha[e] for e in local[v0]], dim=g.k)
    return Face(serialize.graph_hash(g), verts, tuple(sorted(dset)), dim, span)


def face_closure(g: GkmGraph, v: int, seed) -> Face | ClosureReport:
    """Close a star subset at v; a Face when |seed|-regular, else a report."""
    seed = tuple(sorted(set(seed)))
    for e in seed:
        if g.src[e] != v:
            raise ValueError("seed darts must start at the base vertex")
    if not seed:
        return Face(serialize.graph_hash(g), (v,), (), 0, ())
    dset, local = _close(g, seed)
    face = _face_from_closure(g, dset, local)
    if face is not None and face.dim == len(seed):
        return face
    return ClosureReport(seed, tuple(sorted(dset)),
                         {u: len(st) for u, st in sorted(local.items())})


@dataclass
class FacePoset:
    graph: GkmGraph
    faces: tuple[Face, ...]
    max_dim: int
    f_vector: tuple[int, ...]
    star_index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.star_index:
            idx = {}
            for f in self.faces:
                if f.dim == 0:
                    continue
                for v in f.vertices:
                    idx[(v, frozenset(f.star_at(self.graph, v)))] = f
            self.star_index = idx

    def leq(self, a: Face, b: Face) -> bool:
        return b.contains(a)

    def below(self, top: Face, strict: bool = False):
        out = [f for f in self.faces if top.contains(f)]
        if strict:
            out = [f for f in out if f != top]
        return out

    def of_dim(self, d: int):
        return [f for f in self.faces if f.dim == d]

    @property
    def top(self) -> Face | None:
        for f in self.faces:
            if f.dim == self.max_dim and len(f.vertices) == self.graph.nv \
                    and len(f.darts) == self.graph.nd:
                return f
        return None

    def face_by_key(self, darts, vertex: int | None = None) -> Face:
        if vertex is not None and not darts:
            target = ((vertex,), ())
        else:
            target = None
        for f in self.faces:
            if target is not None:
                if (f.vertices, f.darts) == target:
                    return f
            elif f.darts == tuple(sorted(darts)):
                return f
        raise KeyError("no face with that key")


def enumerate_faces(g: GkmGraph, max_dim: int | None = None,
                    budget: int | None = None) -> FacePoset:
    """All faces of dimension <= max_dim, discovered from every star seed.

    Seeds grow by cardinality; a seed equal to the local star of an already
    known face is skipped, and closures that outgrow their seed size are
    cached as dead.  `budget` caps the number of faces (BudgetExceeded).
    """
    if g.connection is None:
        raise ValueError("face enumeration needs a connection")
    n = max(g.valences)
    if max_dim is None:
        max_dim = n
    max_dim = min(max_dim, n)
    ghash = serialize.graph_hash(g)

    faces: list[Face] = [Face(ghash, (v,), (), 0, ()) for v in range(g.nv)]
    star_index: dict = {}
    dead: set = set()
    for s in range(1, max_dim + 1):
        for v in range(g.nv):
            for seed in combinations(g.star[v], s):
                key = (v, frozenset(seed))
                if key in star_index or key in dead:
                    continue
                got = _close(g, seed, bound=s)
                if got is None:
                    dead.add(key)
                    continue
                dset, local = got
                face = _face_from_closure(g, dset, local)
                if face is None or face.dim != s:
                    dead.add(key)
                    continue
                for u, st in local.items():
                    star_index[(u, frozenset(st))] = face
                faces.append(face)
                if budget is not None and len(faces) > budget:
                    raise BudgetExceeded(
                        f"face budget {budget} exceeded at dimension {s}")
    faces.sort(key=lambda f: f.key)
    fvec = [0] * (max_dim + 1)
    for f in faces:
        fvec[f.dim] += 1
    return FacePoset(g, tuple(faces), max_dim, tuple(fvec), star_index)


def completeness_level(g: GkmGraph, poset: FacePoset) -> int:
    """Largest j with every i-subset of every star (i <= j) a face star."""
    n = max(g.valences)
    if poset.max_dim < n:
        raise ValueError("poset does not cover all dimensions")
    level = 0
    for j in range(1, n + 1):
        for v in range(g.nv):
            for seed in combinations(g.star[v], j):
                if (v, frozenset(seed)) not in poset.star_index:
                    return level
        level = j
    return level


def interval(poset: FacePoset, lower: Face, upper: Face) -> tuple[Face, ...]:
    if not upper.contains(lower):
        raise ValueError("interval endpoints are not nested")
    return tuple(f for f in poset.faces
                 if upper.contains(f) and f.contains(lower))


def _is_boolean(elems, leq) -> bool:
    """Is the interval (with its induced order) a Boolean lattice?

    Order-theoretic test: the atom-support map must be an order isomorphism
    onto the subset lattice of the atom set.
    """
    bottoms = [x for x in elems if not any(leq(y, x) and y != x for y in elems)]
    if len(bottoms) != 1:
        return False
    bot = bottoms[0]
    atoms = [x for x in elems if x != bot and not any(
        y != bot and y != x and leq(y, x) for y in elems)]
    m = len(atoms)
    if len(elems) != 2 ** m:
        return False
    support = {}
    for x in elems:
        support[x] = frozenset(i for i, a in enumerate(atoms) if leq(a, x))
    if len(set(support.values())) != len(elems):
        return False
    for x in elems:
        for y in elems:
            if (support[x] <= support[y]) != leq(x, y):
                return False
    return True


def is_simplicial_below(poset, top) -> bool:
    """Is the op-poset of faces weakly below `top` a simplicial poset?

    Equivalent to every interval [f, top] being Boolean; upper intervals of
    Boolean lattices are Boolean, so checking minimal f suffices.  Also
    verifies that interval ranks match dimension differences when the
    elements carry a `dim` attribute.
    """
    elems = poset.below(top)
    minimal = [x for x in elems
               if not any(poset.leq(y, x) and y != x for y in elems)]
    for x in minimal:
        iv = [y for y in elems if poset.leq(x, y)]
        if not _is_boolean(iv, poset.leq):
            return False
        if hasattr(top, "dim"):
            atoms = [y for y in iv if y != x and not any(
                z != x and z != y and poset.leq(z, y) for z in iv)]
            if len(atoms) != top.dim - x.dim:
                return False
    return True


def hall_euler(poset: FacePoset, top: Face, check: bool = True) -> int:
    """Reduced Euler characteristic of the order complex of the strict
    subface poset, from face numbers alone.

    With f_{-1} = 1 and f_i the number of proper subfaces of dimension
    dim(top)-i-1, this is the alternating sum over i = -1 .. dim(top)-1.
    """
    if check and not is_simplicial_below(poset, top):
        raise ValueError("subface poset below top is not simplicial")
    d = top.dim
    counts = [0] * d
    for f in poset.below(top, strict=True):
        counts[f.dim] += 1
    total = -1
    for q in range(d):
        sign = 1 if (d - q - 1) % 2 == 0 else -1
        total += sign * counts[q]
    return total


# ---------------------------------------------------------------------------
# Order complexes and homology
# ---------------------------------------------------------------------------

@dataclass
class ChainComplexModel:
    """Simplices of an order complex with integral boundary matrices.

    simplices[p] lists p-simplices as tuples of element indices, increasing
    in a fixed linear extension; boundaries[p] is the sparse matrix of the
    map from p-chains to (p-1)-chains (boundaries[0] is the augmentation).
    """
    labels: tuple
    simplices: tuple[tuple[tuple[int, ...], ...], ...]
    boundaries: tuple[dict, ...]

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    def reduced_euler(self) -> int:
        total = -1
        for p, simps in enumerate(self.simplices):
            total += len(simps) if p % 2 == 0 else -len(simps)
        return total

    def check_boundary_squares_to_zero(self) -> bool:
        for p in range(1, len(self.simplices)):
            lower = self.boundaries[p - 1]
            acc: dict[tuple[int, int], int] = {}
            by_col: dict[int, list[tuple[int, int]]] = {}
            for (row, col), val in lower.items():
                by_col.setdefault(col, []).append((row, val))
            for (row, col), val in self.boundaries[p].items():
                for r2, v2 in by_col.get(row, ()):
                    key = (r2, col)
                    acc[key] = acc.get(key, 0) + v2 * val
            if any(acc.values()):
                return False
        return True

    def facet_lines(self) -> list[str]:
        """Maximal simplices, one per line, vertex indices space-separated."""
        all_simps = set()
        proper = set()
        for simps in self.simplices:
            for s in simps:
                all_simps.add(s)
                for i in range(len(s)):
                    proper.add(s[:i] + s[i + 1:])
        out = sorted(s for s in all_simps if s not in proper)
        return [" ".join(map(str, s)) for s in out]


def order_complex(elements, leq, budget: int | None = None) -> ChainComplexModel:
    """Chains of a finite poset as simplices with signed boundary maps."""
    elems = list(elements)
    n = len(elems)
    above = [[] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and leq(elems[i], elems[j]):
                above[i].append(j)
    simplices: list[list[tuple[int, ...]]] = [[(i,) for i in range(n)]]
    total = n
    while simplices[-1]:
        nxt = []
        for chain in simplices[-1]:
            last = chain[-1]
            for j in above[last]:
                nxt.append(chain + (j,))
        total += len(nxt)
        if budget is not None and total > budget:
            raise BudgetExceeded(f"simplex budget {budget} exceeded")
        if nxt:
            simplices.append(nxt)
        else:
            break
    index = [{s: i for i, s in enumerate(level)} for level in simplices]
    boundaries: list[dict] = [{(0, i): 1 for i in range(n)}]
    for p in range(1, len(simplices)):
        mat: dict[tuple[int, int], int] = {}
        for col, s in enumerate(simplices[p]):
            for i in range(len(s)):
                face = s[:i] + s[i + 1:]
                row = index[p - 1][face]
                mat[(row, col)] = 1 if i % 2 == 0 else -1
        boundaries.append(mat)
    return ChainComplexModel(tuple(elems),
                             tuple(tuple(level) for level in simplices),
                             tuple(boundaries))


def strict_subface_complex(poset: FacePoset, top: Face,
                           budget: int | None = None) -> ChainComplexModel:
    """Order complex of the poset of proper faces of `top`."""
    elems = poset.below(top, strict=True)
    return order_complex(elems, poset.leq, budget=budget)


def reduced_homology(model: ChainComplexModel):
    """Reduced integral homology: per degree (Betti rank, torsion factors)."""
    counts = model.counts()
    dims = len(counts)
    ranks = []
    torsion = []
    for p in range(dims):
        ncols = counts[p]
        nrows = counts[p - 1] if p else 1
        invs = lattice.smith_diagonal(model.boundaries[p], shape=(nrows, ncols))
        ranks.append(sum(1 for d in invs if d))
        torsion.append(tuple(d for d in invs if d > 1))
    ranks.append(0)
    torsion.append(())
    out = []
    for p in range(dims):
        betti = counts[p] - ranks[p] - ranks[p + 1]
        out.append((betti, torsion[p + 1]))
    return out


def betti_numbers(model: ChainComplexModel) -> tuple[int, ...]:
    return tuple(b for b, _ in reduced_homology(model))
