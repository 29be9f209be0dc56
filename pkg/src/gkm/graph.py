"""GKM-graph data model, axiom validation, holonomy, connection inference.

A GKM graph is a simple regular graph whose oriented edges (darts) carry
nonzero labels in Z^k, together with a bijection between the endpoint stars
of every dart.  Three axioms tie these together: star labels generate the
full lattice Z^k at every vertex (rank condition), reversing a dart negates
its label (opposite sign condition), and transporting a dart across an edge
shifts its label by an integer multiple of the edge label (congruence
condition).

Graphs are immutable after construction; every analysis returns fresh
values, so certificates can reference a frozen object by content hash.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from . import lattice

Vec = tuple[int, ...]


@dataclass(frozen=True)
class GkmGraph:
    """Immutable GKM graph with canonically ordered vertices and darts.

    Vertices are indexed 0..nv-1 in canonical order (coordinates, then
    name); darts 0..nd-1 sorted by (source, target).  `connection[e]` is
    aligned with `star[src[e]]`: entry i is the image of star[src[e]][i]
    in the star of dst[e].  `connection` is None for a bare labelled graph
    awaiting inference.
    """

    k: int
    names: tuple[str, ...]
    coords: tuple[Vec | None, ...]
    src: tuple[int, ...]
    dst: tuple[int, ...]
    reverse: tuple[int, ...]
    alpha: tuple[Vec, ...]
    star: tuple[tuple[int, ...], ...]
    connection: tuple[tuple[int, ...], ...] | None
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        pos = [0] * len(self.src)
        for v, st in enumerate(self.star):
            for i, e in enumerate(st):
                pos[e] = i
        object.__setattr__(self, "_pos_in_star", tuple(pos))

    @property
    def nv(self) -> int:
        return len(self.names)

    @property
    def nd(self) -> int:
        return len(self.src)

    @property
    def valences(self) -> tuple[int, ...]:
        return tuple(len(st) for st in self.star)

    def nabla(self, e: int, ep: int) -> int:
        """Image of dart `ep` under the connection along dart `e`."""
        if self.connection is None:
            raise ValueError("graph has no connection")
        if self.src[e] != self.src[ep]:
            raise ValueError("darts do not share a source")
        return self.connection[e][self._pos_in_star[ep]]

    def dart_repr(self, e: int) -> str:
        return f"{self.names[self.src[e]]}->{self.names[self.dst[e]]}"

    def find_dart(self, src_name: str, dst_name: str) -> int:
        u = self.names.index(src_name)
        w = self.names.index(dst_name)
        for e in self.star[u]:
            if self.dst[e] == w:
                return e
        raise KeyError(f"no dart {src_name}->{dst_name}")


def make_graph(k, vertices, darts, connection=None, metadata=None) -> GkmGraph:
    """Assemble a GkmGraph from builder-friendly descriptions.

    vertices: iterable of (name, coords-or-None)
    darts:    iterable of (src name, dst name, alpha tuple)
    connection: optional {(src, dst): [((a, b), (c, d)), ...]} mapping each
        dart (given as a vertex-name pair) to the star bijection it induces,
        with member darts also given as vertex-name pairs.
    """
    vlist = sorted(vertices, key=lambda t: (t[1] is None, t[1] or (), t[0]))
    names = tuple(name for name, _ in vlist)
    coords = tuple(c if c is None else tuple(c) for _, c in vlist)
    if len(set(names)) != len(names):
        raise ValueError("duplicate vertex names")
    idx = {name: i for i, name in enumerate(names)}

    seen = {}
    dlist = []
    for u, w, a in darts:
        ui, wi = idx[u], idx[w]
        if ui == wi:
            raise ValueError(f"loop at {u}")
        if (ui, wi) in seen:
            raise ValueError(f"duplicate dart {u}->{w}")
        seen[(ui, wi)] = True
        dlist.append((ui, wi, tuple(a)))
    dlist.sort(key=lambda t: (t[0], t[1]))
    dart_id = {(u, w): e for e, (u, w, _) in enumerate(dlist)}

    src = tuple(t[0] for t in dlist)
    dst = tuple(t[1] for t in dlist)
    alpha = tuple(t[2] for t in dlist)
    try:
        reverse = tuple(dart_id[(w, u)] for u, w, _ in dlist)
    except KeyError:
        raise ValueError("dart without a reverse") from None

    star_lists: list[list[int]] = [[] for _ in names]
    for e, u in enumerate(src):
        star_lists[u].append(e)
    star = tuple(tuple(st) for st in star_lists)

    conn = None
    if connection is not None:
        pos = {}
        for v, st in enumerate(star):
            for i, e in enumerate(st):
                pos[e] = i
        rows = []
        for e in range(len(src)):
            u, w = names[src[e]], names[dst[e]]
            pairs = connection[(u, w)]
            row = [-1] * len(star[src[e]])
            for (a, b), (c, d) in pairs:
                ep = dart_id[(idx[a], idx[b])]
                fp = dart_id[(idx[c], idx[d])]
                row[pos[ep]] = fp
            if -1 in row:
                raise ValueError(f"incomplete connection along {u}->{w}")
            rows.append(tuple(row))
        conn = tuple(rows)

    return GkmGraph(
        k=k, names=names, coords=coords, src=src, dst=dst, reverse=reverse,
        alpha=alpha, star=star, connection=conn, metadata=metadata or {},
    )


def with_connection(g: GkmGraph, conn: tuple[tuple[int, ...], ...]) -> GkmGraph:
    return GkmGraph(k=g.k, names=g.names, coords=g.coords, src=g.src,
                    dst=g.dst, reverse=g.reverse, alpha=g.alpha, star=g.star,
                    connection=conn, metadata=dict(g.metadata))


def with_alpha(g: GkmGraph, alpha) -> GkmGraph:
    return GkmGraph(k=g.k, names=g.names, coords=g.coords, src=g.src,
                    dst=g.dst, reverse=g.reverse, alpha=tuple(alpha),
                    star=g.star, connection=g.connection,
                    metadata=dict(g.metadata))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

@dataclass
class ValidationReport:
    structural_errors: list[str]
    regularity_failures: list[str]
    rank_failures: list[str]
    opposite_failures: list[str]
    congruence_failures: list[str]
    valence_profile: dict[int, int]
    graph_type: tuple[int, int] | None
    congruence: dict[tuple[int, int], int] | None

    @property
    def structurally_ok(self) -> bool:
        return not self.structural_errors

    @property
    def passed(self) -> bool:
        return (self.structurally_ok and not self.regularity_failures
                and not self.rank_failures and not self.opposite_failures
                and not self.congruence_failures)

    def lines(self) -> list[str]:
        out = []
        if self.structural_errors:
            out.append("structure: FAIL")
            out.extend(f"  {s}" for s in self.structural_errors)
            return out
        out.append("structure: ok")
        prof = ",".join(f"{v}x{c}" for v, c in sorted(self.valence_profile.items()))
        out.append(f"valences: {prof}")
        for name, bad in (("regularity", self.regularity_failures),
                          ("rank", self.rank_failures),
                          ("opposite-sign", self.opposite_failures),
                          ("congruence", self.congruence_failures)):
            if bad:
                out.append(f"{name}: FAIL ({len(bad)})")
                out.extend(f"  {s}" for s in bad[:20])
            else:
                out.append(f"{name}: ok")
        if self.graph_type:
            out.append("type: (%d,%d)" % self.graph_type)
        out.append("verdict: %s" % ("pass" if self.passed else "fail"))
        return out


def structural_errors(g: GkmGraph) -> list[str]:
    errs = []
    if g.nv == 0:
        return ["empty vertex set"]
    for e in range(g.nd):
        r = g.reverse[e]
        if g.src[e] == g.dst[e]:
            errs.append(f"loop dart {g.dart_repr(e)}")
        if r == e or g.reverse[r] != e or g.src[r] != g.dst[e] or g.dst[r] != g.src[e]:
            errs.append(f"broken reverse at {g.dart_repr(e)}")
        if len(g.alpha[e]) != g.k:
            errs.append(f"label dimension mismatch at {g.dart_repr(e)}")
        elif not any(g.alpha[e]):
            errs.append(f"zero label at {g.dart_repr(e)}")
    pairs = {(g.src[e], g.dst[e]) for e in range(g.nd)}
    if len(pairs) != g.nd:
        errs.append("duplicate darts on an ordered vertex pair")
    if g.connection is not None:
        for e in range(g.nd):
            row = g.connection[e]
            tgt = g.star[g.dst[e]]
            if sorted(row) != sorted(tgt):
                errs.append(f"connection along {g.dart_repr(e)} is not a bijection")
            elif g.nabla(e, e) != g.reverse[e]:
                errs.append(f"connection along {g.dart_repr(e)} does not reverse it")
    # connectivity (the axioms make sense per component; we require one)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for e in g.star[u]:
            w = g.dst[e]
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != g.nv:
        errs.append("graph is not connected")
    return errs


def congruence_constant(g: GkmGraph, e: int, ep: int):
    """The integer c with alpha(nabla_e ep) = alpha(ep) + c*alpha(e), or None."""
    f = g.nabla(e, ep)
    res = tuple(x - y for x, y in zip(g.alpha[f], g.alpha[ep]))
    base = g.alpha[e]
    j = next((i for i, x in enumerate(base) if x), None)
    if j is None:
        return None
    if res[j] % base[j]:
        return None
    c = res[j] // base[j]
    if any(x != c * b for x, b in zip(res, base)):
        return None
    return c


def validate(g: GkmGraph) -> ValidationReport:
    """Full axiom check; the construction modules treat this as their oracle."""
    errs = structural_errors(g)
    profile: dict[int, int] = {}
    for v in g.valences:
        profile[v] = profile.get(v, 0) + 1
    if errs or g.connection is None:
        if g.connection is None:
            errs = errs + ["no connection attached"]
        return ValidationReport(errs, [], [], [], [], profile, None, None)

    regularity = []
    if len(profile) > 1:
        regularity.append(f"valence profile not constant: {sorted(profile)}")

    rank_fail = []
    ident = tuple(tuple(1 if i == j else 0 for j in range(g.k)) for i in range(g.k))
    for v in range(g.nv):
        labels = [g.alpha[e] for e in g.star[v]]
        if lattice.hermite_basis(labels, dim=g.k) != ident:
            rank_fail.append(f"star of {g.names[v]} does not generate Z^{g.k}")

    opposite = []
    for e in range(g.nd):
        if g.alpha[g.reverse[e]] != tuple(-x for x in g.alpha[e]):
            opposite.append(g.dart_repr(e))

    congruence_fail = []
    table: dict[tuple[int, int], int] = {}
    for e in range(g.nd):
        for ep in g.star[g.src[e]]:
            c = congruence_constant(g, e, ep)
            if c is None:
                congruence_fail.append(f"({g.dart_repr(e)}; {g.dart_repr(ep)})")
            else:
                table[(e, ep)] = c

    n = g.valences[0] if len(profile) == 1 else None
    gtype = (n, g.k) if n is not None else None
    return ValidationReport([], regularity, rank_fail, opposite,
                            congruence_fail, profile, gtype,
                            table if not congruence_fail else None)


def congruence_constants(g: GkmGraph) -> dict[tuple[int, int], int]:
    """All constants c_e(e'); raises if some residual is not parallel."""
    table = {}
    for e in range(g.nd):
        for ep in g.star[g.src[e]]:
            c = congruence_constant(g, e, ep)
            if c is None:
                raise ValueError(
                    f"congruence fails along {g.dart_repr(e)} at {g.dart_repr(ep)}")
            table[(e, ep)] = c
    return table


def independence_level(g: GkmGraph) -> int:
    """Largest j such that every j labels at any star are independent."""
    bound = min(min(g.valences), g.k)
    stars = {tuple(sorted(g.alpha[e] for e in g.star[v])) for v in range(g.nv)}
    level = bound
    for labels in stars:
        j = level
        while j > 0:
            if all(lattice.rank(sub) == j for sub in combinations(labels, j)):
                break
            j -= 1
        level = j
        if level == 0:
            break
    return level


def holonomy(g: GkmGraph, path, e: int) -> int:
    """Transport dart e along the composable edge path (list of dart ids)."""
    cur = e
    at = g.src[e]
    for step in path:
        if g.src[step] != at:
            raise ValueError("path is not composable from the dart's source")
        cur = g.nabla(step, cur)
        at = g.dst[step]
    return cur


def connection_is_involutive(g: GkmGraph) -> bool:
    """Diagnostic: does the reverse dart always carry the inverse bijection?

    Not required by the axioms; reported because the periodic constructions
    happen to satisfy it.
    """
    for e in range(g.nd):
        r = g.reverse[e]
        for ep in g.star[g.src[e]]:
            if g.nabla(r, g.nabla(e, ep)) != ep:
                return False
    return True


# ---------------------------------------------------------------------------
# Connection inference
# ---------------------------------------------------------------------------

@dataclass
class InferenceResult:
    graph: GkmGraph | None
    ambiguous: list[int]
    infeasible: list[int]

    @property
    def ok(self) -> bool:
        return self.graph is not None


def _count_matchings(cands: list[list[int]], limit: int = 2):
    """Count perfect matchings given per-slot candidate lists, up to `limit`.

    Returns (count, first_matching).
    """
    n = len(cands)
    used: set[int] = set()
    pick = [0] * n
    found: list[list[int]] = []
    order = sorted(range(n), key=lambda i: len(cands[i]))

    def go(i):
        if len(found) >= limit:
            return
        if i == n:
            found.append(list(pick))
            return
        slot = order[i]
        for f in cands[slot]:
            if f not in used:
                used.add(f)
                pick[slot] = f
                go(i + 1)
                used.discard(f)
                if len(found) >= limit:
                    return

    go(0)
    return len(found), (found[0] if found else None)


def infer_connection(g: GkmGraph) -> InferenceResult:
    """Derive the connection from the labels via the congruence condition.

    Along each dart e, dart e' at the source may only map to targets f with
    alpha(f) - alpha(e') an integer multiple of alpha(e), and e itself must
    map to its reverse.  Succeeds when that leaves a unique perfect matching
    along every dart.
    """
    for e in range(g.nd):
        if g.alpha[g.reverse[e]] != tuple(-x for x in g.alpha[e]):
            raise ValueError("labels violate the opposite sign condition")

    ambiguous: list[int] = []
    infeasible: list[int] = []
    rows: list[tuple[int, ...] | None] = []
    for e in range(g.nd):
        source = g.star[g.src[e]]
        target = g.star[g.dst[e]]
        base = g.alpha[e]
        j = next(i for i, x in enumerate(base) if x)
        cands = []
        for ep in source:
            if ep == e:
                cands.append([g.reverse[e]])
                continue
            opts = []
            for f in target:
                res = tuple(x - y for x, y in zip(g.alpha[f], g.alpha[ep]))
                if res[j] % base[j]:
                    continue
                c = res[j] // base[j]
                if all(x == c * b for x, b in zip(res, base)):
                    opts.append(f)
            cands.append(opts)
        count, match = _count_matchings(cands)
        if count == 0:
            infeasible.append(e)
            rows.append(None)
        elif count > 1:
            ambiguous.append(e)
            rows.append(None)
        else:
            rows.append(tuple(match))

    if ambiguous or infeasible:
        return InferenceResult(None, ambiguous, infeasible)
    return InferenceResult(with_connection(g, tuple(rows)), [], [])


# ---------------------------------------------------------------------------
# Restriction (a face of a GKM graph is again a GKM graph)
# ---------------------------------------------------------------------------

def restrict(g: GkmGraph, dart_ids, metadata=None) -> GkmGraph:
    """Sub-GKM-graph on a connection-closed, reverse-closed dart set."""
    darts = sorted(dart_ids)
    dset = set(darts)
    for e in darts:
        if g.reverse[e] not in dset:
            raise ValueError("dart set is not closed under reversal")
    verts = sorted({g.src[e] for e in darts})
    vset = set(verts)
    vdesc = [(g.names[v], g.coords[v]) for v in verts]
    ddesc = [(g.names[g.src[e]], g.names[g.dst[e]], g.alpha[e]) for e in darts]
    conn = None
    if g.connection is not None:
        conn = {}
        for e in darts:
            u, w = g.names[g.src[e]], g.names[g.dst[e]]
            pairs = []
            for ep in g.star[g.src[e]]:
                if ep not in dset:
                    continue
                f = g.nabla(e, ep)
                if f not in dset:
                    raise ValueError("dart set is not connection-closed")
                pairs.append(((u, g.names[g.dst[ep]]),
                              (w, g.names[g.dst[f]])))
            conn[(u, w)] = pairs
    sub = make_graph(g.k, vdesc, ddesc, connection=conn,
                     metadata=metadata or {})
    if len(sub.names) != len(vset):
        raise AssertionError("restriction lost vertices")
    return sub
