"""Periodic cube-and-diagonal GKM graphs and their finite quotients.

The family lives in R^d: edge graphs of small cubes centered at the integer
points and at the half-integer points, joined corner-to-corner by diagonal
edges, with extra chordal edge families E_1..E_r jumping along the main
diagonal.  All coordinates are scaled by 6 so every vertex is an integer
point; the quotient by a*Z^d then becomes arithmetic modulo 6a.

Labels take values in Z^(d+1): cube edges carry inner normals on integer
cubes and outer normals on half cubes, diagonals carry the extra coordinate
vector oriented out of integer cubes, and each chordal edge carries a signed
combination of the local frame weighted by powers of the search parameters.
The connection matches darts by kind (axis direction, diagonal, or chord
family), which realizes the facet families of the construction; `validate`
is run on every emitted graph and is the oracle for all of the
interpretation choices here.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from . import graph as graphmod
from . import lattice
from .graph import GkmGraph, make_graph, validate, with_alpha

PAPER_LITERAL = "paper-literal"
REGULARITY_SCALED = "regularity-scaled"


class BuildError(ValueError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


@dataclass(frozen=True)
class ConstructionConfig:
    d: int
    r: int
    a: int
    t: tuple[int, ...] = ()
    strategy: str = ""          # resolved in normalize()
    primitivize: bool | None = None

    def normalize(self) -> "ConstructionConfig":
        d, r, a = self.d, self.r, self.a
        if d < 1:
            raise BuildError("d must be >= 1")
        if r < 0:
            raise BuildError("r must be >= 0")
        if a < 1:
            raise BuildError("a must be >= 1")
        strategy = self.strategy
        if not strategy:
            strategy = PAPER_LITERAL if d % 2 else REGULARITY_SCALED
        if strategy not in (PAPER_LITERAL, REGULARITY_SCALED):
            raise BuildError(f"unknown strategy {strategy!r}")
        if r >= 1:
            need = (2 ** r) * (d if strategy == REGULARITY_SCALED else 1)
            if a % need:
                raise BuildError(
                    f"modulus a={a} must be a multiple of {need} for r={r} "
                    f"({strategy})")
        t = tuple(self.t or ())
        if r >= 2:
            if len(t) != d + 1:
                raise BuildError(f"r={r} needs {d + 1} parameters t, got {len(t)}")
        else:
            t = ()
        prim = self.primitivize
        if prim is None:
            prim = r >= 2
        return ConstructionConfig(d, r, a, t, strategy, prim)


# ---------------------------------------------------------------------------
# Scaled-coordinate geometry helpers
# ---------------------------------------------------------------------------

def corner(v, mod: int):
    """(cube center, corner sign, is-integer-cube) for a scaled vertex."""
    center = []
    sign = []
    kinds = set()
    for x in v:
        m = x % 6
        if m == 1:
            center.append((x - 1) % mod); sign.append(1); kinds.add("int")
        elif m == 5:
            center.append((x + 1) % mod); sign.append(-1); kinds.add("int")
        elif m == 4:
            center.append((x - 1) % mod); sign.append(1); kinds.add("half")
        elif m == 2:
            center.append((x + 1) % mod); sign.append(-1); kinds.add("half")
        else:
            raise ValueError(f"{v} is not a vertex of the construction")
    if len(kinds) != 1:
        raise ValueError(f"{v} is not a vertex of the construction")
    return tuple(center), tuple(sign), kinds.pop() == "int"


def epsilon_sign(i: int, j: int, v, d: int, mod: int) -> int:
    """The sign function of family j at coordinate slot i (1-based).

    For i <= d the sign is read off the integer cube the vertex belongs to
    (or is joined to by its diagonal); for i = d+1 it is read off the first
    coordinate of the vertex's own cube center.
    """
    if not (1 <= i <= d + 1) or j < 1:
        raise ValueError("index out of range")
    center, sign, is_int = corner(v, mod)
    denom = 6 * (2 ** (j - 1))
    if i <= d:
        if is_int:
            x = center[i - 1]
        else:
            x = (center[i - 1] + 3 * sign[i - 1]) % mod
        return -1 if (x // denom) % 2 else 1
    return -1 if (center[0] // denom) % 2 else 1


def _chord_out(j: int, v, d: int, mod: int, strategy: str) -> bool:
    """Does vertex v emit the family-j chordal edge (rather than receive it)?"""
    scale = d if strategy == REGULARITY_SCALED else 1
    denom = 6 * scale * (2 ** (j - 1))
    return (sum(v) // denom) % 2 == 0


def _frame(v, d: int, mod: int):
    """Axis labels w_1..w_d and diagonal label w_{d+1} at a vertex."""
    center, sign, is_int = corner(v, mod)
    w = []
    for i in range(d):
        s = -sign[i] if is_int else sign[i]
        w.append(tuple(s if p == i else 0 for p in range(d + 1)))
    w.append(tuple((1 if is_int else -1) if p == d else 0 for p in range(d + 1)))
    return w


def _chord_label(j: int, v, d: int, t, mod: int):
    w = _frame(v, d, mod)
    eps = [epsilon_sign(i, j, v, d, mod) for i in range(1, d + 2)]
    out = [0] * (d + 1)
    for i in range(d + 1):
        coef = eps[i] * (t[i] ** (j - 1) if j >= 2 else 1)
        for p in range(d + 1):
            out[p] += coef * w[i][p]
    return tuple(out)


def _star_labels(v, cfg: ConstructionConfig, mod: int):
    """All d+1+r star labels at a vertex, without assembling the graph."""
    labels = list(_frame(v, cfg.d, mod))
    for j in range(1, cfg.r + 1):
        if _chord_out(j, v, cfg.d, mod, cfg.strategy):
            labels.append(_chord_label(j, v, cfg.d, cfg.t, mod))
        else:
            jump = (6 * 2 ** (j - 1)) % mod
            u = tuple((x - jump) % mod for x in v)
            labels.append(tuple(-x for x in _chord_label(j, u, cfg.d, cfg.t, mod)))
    return labels


def _vertices(d: int, a: int, mod: int):
    for base in (0, 3):
        for center in product(range(base, 6 * a, 6), repeat=d):
            for sign in product((1, -1), repeat=d):
                yield tuple((c + s) % mod for c, s in zip(center, sign))


# ---------------------------------------------------------------------------
# Build
# ---------------------------------------------------------------------------

def build(config: ConstructionConfig) -> GkmGraph:
    """Finite quotient graph for the given parameters; validates before returning."""
    cfg = config.normalize()
    d, r, a = cfg.d, cfg.r, cfg.a
    mod = 6 * a
    k = d + 1

    def name(v):
        return ",".join(map(str, v))

    vertices = []
    darts = []
    chord_tally: dict[tuple, list[int]] = {}
    for v in _vertices(d, a, mod):
        center, sign, is_int = corner(v, mod)
        vertices.append((name(v), v))
        w = _frame(v, d, mod)
        for i in range(d):
            tgt = tuple((x - 2 * sign[i] if p == i else x) % mod
                        for p, x in enumerate(v))
            darts.append((name(v), name(tgt), w[i]))
        diag_tgt = tuple((x + s) % mod for x, s in zip(v, sign))
        darts.append((name(v), name(diag_tgt), w[d]))
        tally = chord_tally.setdefault(v, [0] * r)
        for j in range(1, r + 1):
            if _chord_out(j, v, d, mod, cfg.strategy):
                jump = (6 * 2 ** (j - 1)) % mod
                tgt = tuple((x + jump) % mod for x in v)
                lab = _chord_label(j, v, d, cfg.t, mod)
                darts.append((name(v), name(tgt), lab))
                darts.append((name(tgt), name(v), tuple(-x for x in lab)))
                tally[j - 1] += 1
                chord_tally.setdefault(tgt, [0] * r)[j - 1] += 1

    for v, tally in chord_tally.items():
        for j, count in enumerate(tally, start=1):
            if count != 1:
                raise BuildError(
                    f"chord family {j} hits vertex {v} {count} times; "
                    f"strategy {cfg.strategy!r} breaks regularity here")

    meta = {"construction": {"d": d, "r": r, "a": a, "t": list(cfg.t),
                             "strategy": cfg.strategy,
                             "primitivize": cfg.primitivize}}
    g = make_graph(k, vertices, darts, connection=None, metadata=meta)
    g = graphmod.with_connection(g, _kind_connection(g))

    if cfg.primitivize:
        alpha = list(g.alpha)
        kinds = dart_kinds(g)
        for e, kind in enumerate(kinds):
            if kind[0] == "e":
                alpha[e] = lattice.primitive(alpha[e])
        g = with_alpha(g, alpha)

    report = validate(g)
    if not report.passed:
        bad = [(name, len(fails)) for name, fails in
               (("regularity", report.regularity_failures),
                ("rank", report.rank_failures),
                ("opposite-sign", report.opposite_failures),
                ("congruence", report.congruence_failures)) if fails]
        summary = ", ".join(f"{name}: {count} failures" for name, count in bad)
        raise BuildError(f"built graph fails validation ({summary})", report)
    return g


def _offset_kind(off, d: int, mod: int, jumps):
    nz = [i for i, x in enumerate(off) if x]
    if len(nz) == 1 and off[nz[0]] in (2, mod - 2):
        return ("a", nz[0])
    if all(x in (1, mod - 1) for x in off):
        return ("d",)
    if len(set(off)) == 1 and off[0] in jumps:
        return ("e", jumps[off[0]])
    raise ValueError(f"unrecognized edge offset {off}")


def dart_kinds(g: GkmGraph):
    """Kind of every dart: ('a', axis), ('d',) diagonal, or ('e', family)."""
    c = g.metadata["construction"]
    mod = 6 * c["a"]
    jumps = {}
    for j in range(1, c["r"] + 1):
        step = (6 * 2 ** (j - 1)) % mod
        jumps[step] = j
        jumps[(-step) % mod] = j
    kinds = []
    for e in range(g.nd):
        u = g.coords[g.src[e]]
        w = g.coords[g.dst[e]]
        off = tuple((b - a_) % mod for a_, b in zip(u, w))
        kinds.append(_offset_kind(off, c["d"], mod, jumps))
    return kinds


def _kind_connection(g: GkmGraph):
    kinds = dart_kinds(g)
    by_vertex: list[dict] = [dict() for _ in range(g.nv)]
    for e, kind in enumerate(kinds):
        table = by_vertex[g.src[e]]
        if kind in table:
            raise BuildError(f"two darts of kind {kind} at {g.names[g.src[e]]}")
        table[kind] = e
    rows = []
    for e in range(g.nd):
        tgt = by_vertex[g.dst[e]]
        rows.append(tuple(tgt[kinds[ep]] for ep in g.star[g.src[e]]))
    return tuple(rows)


# ---------------------------------------------------------------------------
# Translations
# ---------------------------------------------------------------------------

def translate(g: GkmGraph, offset):
    """Graph automorphism induced by adding a (scaled) lattice offset.

    Valid offsets have all coordinates divisible by 6, or all congruent to
    3 mod 6 (the half-point shifts).  Returns (vertex_perm, dart_perm).
    """
    c = g.metadata.get("construction")
    if c is None:
        raise ValueError("translate needs a constructed quotient graph")
    mod = 6 * c["a"]
    off = tuple(x % mod for x in offset)
    residues = {x % 6 for x in off}
    if residues not in ({0}, {3}):
        raise ValueError(f"offset {offset} is not in the shift lattice")
    vid = {g.coords[v]: v for v in range(g.nv)}
    vperm = []
    for v in range(g.nv):
        tgt = tuple((x + o) % mod for x, o in zip(g.coords[v], off))
        vperm.append(vid[tgt])
    dart_at = {(g.src[e], g.dst[e]): e for e in range(g.nd)}
    dperm = [dart_at[(vperm[g.src[e]], vperm[g.dst[e]])] for e in range(g.nd)]
    return tuple(vperm), tuple(dperm)


def epsilon(g: GkmGraph, i: int, j: int, vertex_name: str) -> int:
    """Sign function on a built quotient, addressed by vertex name."""
    c = g.metadata.get("construction")
    if c is None:
        raise ValueError("epsilon needs a constructed quotient graph")
    v = g.coords[g.names.index(vertex_name)]
    return epsilon_sign(i, j, v, c["d"], 6 * c["a"])


# ---------------------------------------------------------------------------
# Parameter search
# ---------------------------------------------------------------------------

class ParameterSearchError(ValueError):
    def __init__(self, msg, best_level):
        super().__init__(msg)
        self.best_level = best_level


def _stars_for(cfg: ConstructionConfig):
    mod = 6 * cfg.a
    seen = set()
    for v in _vertices(cfg.d, cfg.a, mod):
        m = tuple(sorted(_star_labels(v, cfg, mod)))
        if m not in seen:
            seen.add(m)
            yield m


def _independence_of(stars, k: int) -> int:
    level = k
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


def find_parameters(d: int, r: int, a: int, bound: int = 8,
                    strategy: str = "") -> tuple[int, ...]:
    """Smallest parameter tuple (by max-norm, then lexicographic) making the
    quotient (d+1)-independent.

    For r <= 1 the labels do not involve the parameters and the empty tuple
    is returned at once.
    """
    if r <= 1:
        return ()
    best = 0
    for radius in range(1, bound + 1):
        for t in product(range(-radius, radius + 1), repeat=d + 1):
            if max(abs(x) for x in t) != radius:
                continue
            cfg = ConstructionConfig(d, r, a, tuple(t), strategy).normalize()
            level = _independence_of(_stars_for(cfg), d + 1)
            best = max(best, level)
            if level == d + 1:
                return tuple(t)
    raise ParameterSearchError(
        f"no parameters within max-norm {bound} reach {d + 1}-independence "
        f"(best level {best})", best)


# ---------------------------------------------------------------------------
# Builtins
# ---------------------------------------------------------------------------

def build_quotient(d: int, r: int, a: int | None = None, t=None,
                   strategy: str = "", primitivize=None) -> GkmGraph:
    if a is None:
        a = 2 ** (r + 1)
    return build(ConstructionConfig(d, r, a, tuple(t or ()), strategy, primitivize))


def cube(d: int) -> GkmGraph:
    return build_quotient(d, 0, 1)


def torus(d: int, a: int) -> GkmGraph:
    return build_quotient(d, 0, a)


_S3 = [(1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)]
_ROOTS = {(1, 2): (1, 0), (2, 3): (0, 1), (1, 3): (1, 1)}


def _root(p: int, q: int):
    """x_p - x_q in the basis (x_1 - x_2, x_2 - x_3)."""
    if p < q:
        return _ROOTS[(p, q)]
    return tuple(-x for x in _ROOTS[(q, p)])


def flag3() -> GkmGraph:
    """Rank-2 GKM graph of the full flag threefold: K_{3,3} on S_3.

    The dart from w to w with positions i<j swapped carries the weight
    x_{w(j)} - x_{w(i)}; the connection reflects labels across the edge
    label, which pairs darts by the position pair they swap.
    """
    names = {w: "".join(map(str, w)) for w in _S3}
    pairs = [(0, 1), (0, 2), (1, 2)]

    def swap(w, i, j):
        x = list(w)
        x[i], x[j] = x[j], x[i]
        return tuple(x)

    vertices = [(names[w], None) for w in _S3]
    darts = []
    conn = {}
    for w in _S3:
        for i, j in pairs:
            wp = swap(w, i, j)
            darts.append((names[w], names[wp], _root(w[j], w[i])))
    for w in _S3:
        for i, j in pairs:
            wp = swap(w, i, j)
            maps = []
            for i2, j2 in pairs:
                maps.append(((names[w], names[swap(w, i2, j2)]),
                             (names[wp], names[swap(wp, i2, j2)])))
            conn[(names[w], names[wp])] = maps
    g = make_graph(2, vertices, darts, connection=conn,
                   metadata={"builtin": "flag3"})
    report = validate(g)
    if not report.passed:
        raise BuildError("flag3 fails validation:\n" + "\n".join(report.lines()))
    return g


def builtin(spec: str) -> GkmGraph:
    """Named example graphs: cube(d), torus(d,a), flag3."""
    s = spec.replace(" ", "")
    if s == "flag3":
        return flag3()
    for head in ("cube", "torus"):
        if s.startswith(head + "(") and s.endswith(")"):
            args = s[len(head) + 1:-1].split(",")
            try:
                nums = [int(x) for x in args]
            except ValueError:
                break
            if head == "cube" and len(nums) == 1:
                return cube(nums[0])
            if head == "torus" and len(nums) == 2:
                return torus(nums[0], nums[1])
    raise ValueError(f"unknown builtin {spec!r}")
