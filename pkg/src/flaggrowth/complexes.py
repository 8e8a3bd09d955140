"""Finite abstract simplicial complexes.

Vertices are opaque string tokens kept in lexicographic order; that order
fixes every orientation sign downstream.  A complex is stored by its facets
and faces are enumerated lazily.  The complex with no vertices stands for
``{∅}`` (it has the empty face and nothing else), which is what links of
facets and the join identity need.
"""

from __future__ import annotations

import itertools
import re
from collections import Counter
from functools import cached_property
from pathlib import Path

import networkx as nx


class SimplicialComplex:
    """Immutable simplicial complex given by its maximal simplices."""

    def __init__(self, facets, name=None):
        cleaned = set()
        for f in facets:
            f = tuple(f)
            if len(set(f)) != len(f):
                raise ValueError(f"facet {f!r} repeats a vertex")
            for v in f:
                if not isinstance(v, str) or not v or any(ch.isspace() for ch in v) or v.startswith("#"):
                    raise ValueError(f"bad vertex token {v!r}")
            cleaned.add(frozenset(f))
        cleaned.discard(frozenset())
        # drop facets contained in others, larger ones first
        maximal = []
        for f in sorted(cleaned, key=len, reverse=True):
            if not any(f < g for g in maximal):
                maximal.append(f)
        self.vertices = tuple(sorted(set().union(*maximal))) if maximal else ()
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.facets = tuple(sorted(tuple(sorted(f)) for f in maximal))
        self.name = name

    # -- basic data -------------------------------------------------------

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"SimplicialComplex({label}V={len(self.vertices)}, f={self.f_vector})"

    def __eq__(self, other):
        return isinstance(other, SimplicialComplex) and self.facets == other.facets

    def __hash__(self):
        return hash(self.facets)

    def __contains__(self, simplex):
        s = frozenset(simplex)
        return not s or any(s <= set(f) for f in self.facets)

    @property
    def dim(self) -> int:
        return max((len(f) for f in self.facets), default=0) - 1

    @cached_property
    def facet_ids(self):
        """Facets as sorted tuples of vertex indices."""
        return tuple(sorted(tuple(sorted(self.index[v] for v in f)) for f in self.facets))

    def faces(self, size: int) -> list[tuple[int, ...]]:
        """All faces with ``size`` vertices, as sorted index tuples in lex order.

        ``size=0`` returns the empty face.
        """
        return self._faces_by_size.get(size, []) if size > 0 else [()]

    @cached_property
    def _faces_by_size(self):
        out = {}
        for k in range(1, self.dim + 2):
            s = set()
            for f in self.facet_ids:
                if len(f) >= k:
                    s.update(itertools.combinations(f, k))
            out[k] = sorted(s)
        return out

    def face_index(self, size: int) -> dict:
        """Map from face tuple to its position in :meth:`faces`."""
        return self._face_index[size] if size > 0 else {(): 0}

    @cached_property
    def _face_index(self):
        return {k: {f: i for i, f in enumerate(fs)} for k, fs in self._faces_by_size.items()}

    def all_faces(self, include_empty=False):
        if include_empty:
            yield ()
        for k in range(1, self.dim + 2):
            yield from self.faces(k)

    @property
    def f_vector(self) -> tuple[int, ...]:
        """(f_{-1}, f_0, f_1, ...) with f_{-1} = 1."""
        return (1,) + tuple(len(self.faces(k)) for k in range(1, self.dim + 2))

    def euler_characteristic(self) -> int:
        return sum((-1) ** (k - 1) * c for k, c in enumerate(self.f_vector) if k > 0)

    def names(self, face) -> tuple[str, ...]:
        return tuple(self.vertices[i] for i in face)

    def ids(self, simplex) -> tuple[int, ...]:
        try:
            return tuple(sorted(self.index[v] for v in simplex))
        except KeyError as exc:
            raise KeyError(f"unknown vertex {exc.args[0]!r}") from None

    @cached_property
    def graph(self) -> nx.Graph:
        """1-skeleton on vertex names."""
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for f in self.facets:
            g.add_edges_from(itertools.combinations(f, 2))
        return g

    def neighbors(self, v) -> tuple[str, ...]:
        return tuple(sorted(self.graph[v]))


FVector = tuple


def build_complex(facets, name=None) -> SimplicialComplex:
    """Complex generated by ``facets`` (contained facets are discarded)."""
    facets = [tuple(f) for f in facets]
    if not facets:
        raise ValueError("empty facet list")
    if any(not f for f in facets):
        raise ValueError("empty facet")
    return SimplicialComplex(facets, name=name)


# -- flagness --------------------------------------------------------------

def empty_triangles(c: SimplicialComplex) -> list[tuple[str, str, str]]:
    """3-cliques of the 1-skeleton that do not span a face, sorted."""
    g = c.graph
    out = []
    for u, v in sorted(tuple(sorted(e)) for e in g.edges):
        for w in sorted(set(g[u]) & set(g[v])):
            if w > v and (u, v, w) not in c:
                out.append((u, v, w))
    return out


def is_flag(c: SimplicialComplex) -> bool:
    """True iff every clique of the 1-skeleton spans a simplex."""
    return all(tuple(q) in c for q in nx.find_cliques(c.graph))


# -- local structure ---------------------------------------------------------

def _check_face(c, s):
    s = tuple(s)
    if any(v not in c.index for v in s):
        raise KeyError(f"{s!r} has an unknown vertex")
    if s not in c:
        raise ValueError(f"{s!r} is not a face")
    return frozenset(s)


def link(c: SimplicialComplex, s) -> SimplicialComplex:
    """Faces disjoint from ``s`` whose union with ``s`` is a face."""
    if isinstance(s, str):
        s = (s,)
    s = _check_face(c, s)
    return SimplicialComplex([set(f) - s for f in c.facets if s <= set(f)])


def star(c: SimplicialComplex, v) -> SimplicialComplex:
    """Closed star of a vertex."""
    if v not in c.index:
        raise KeyError(f"unknown vertex {v!r}")
    return SimplicialComplex([f for f in c.facets if v in f])


def full_subcomplex(c: SimplicialComplex, S) -> SimplicialComplex:
    """All faces of ``c`` whose vertices lie in ``S``."""
    S = set(S)
    bad = S - set(c.vertices)
    if bad:
        raise KeyError(f"unknown vertices {sorted(bad)}")
    return SimplicialComplex([set(f) & S for f in c.facets])


def delete_vertex(c: SimplicialComplex, v) -> SimplicialComplex:
    return full_subcomplex(c, set(c.vertices) - {v})


# -- constructions -----------------------------------------------------------

def octahedralize(c: SimplicialComplex) -> SimplicialComplex:
    """Vertices V x {+,-}; signed vertices span a face iff their bases do."""
    facets = []
    for f in c.facets:
        for signs in itertools.product("+-", repeat=len(f)):
            facets.append([v + s for v, s in zip(f, signs)])
    return SimplicialComplex(facets, name=f"O({c.name})" if c.name else None)


def _fresh(c, base):
    name = base
    while name in c.index:
        name += "'"
    return name


def subdivide_edge(c: SimplicialComplex, e, new_vertex=None) -> SimplicialComplex:
    """Stellar subdivision of the edge ``e = {u, v}`` at a new vertex."""
    u, v = sorted(e)
    if u == v or (u, v) not in c or u not in c.index or v not in c.index:
        raise ValueError(f"{e!r} is not an edge")
    w = new_vertex or _fresh(c, f"{u}|{v}")
    if w in c.index:
        raise ValueError(f"vertex {w!r} already present")
    facets = []
    for f in c.facets:
        if u in f and v in f:
            facets.append([x for x in f if x != v] + [w])
            facets.append([x for x in f if x != u] + [w])
        else:
            facets.append(f)
    return SimplicialComplex(facets)


def barycentric_subdivision(c: SimplicialComplex) -> SimplicialComplex:
    """Order complex of the face poset; faces become vertices ``<a,b,...>``."""
    def token(face):
        return "<" + ",".join(face) + ">"
    facets = set()
    for f in c.facets:
        for perm in itertools.permutations(f):
            facets.add(tuple(token(tuple(sorted(perm[:k]))) for k in range(1, len(f) + 1)))
    return SimplicialComplex(facets, name=f"sd({c.name})" if c.name else None)


def join(c1: SimplicialComplex, c2: SimplicialComplex) -> SimplicialComplex:
    """Simplicial join; colliding vertex names get ``0:``/``1:`` prefixes."""
    a, b = c1.facets, c2.facets
    if set(c1.vertices) & set(c2.vertices):
        a = [tuple("0:" + v for v in f) for f in a]
        b = [tuple("1:" + v for v in f) for f in b]
    if not a:
        return SimplicialComplex(b)
    if not b:
        return SimplicialComplex(a)
    return SimplicialComplex([f + g for f in a for g in b])


def relabel(c: SimplicialComplex, mapping) -> SimplicialComplex:
    """Rename vertices through ``mapping`` (dict or callable)."""
    fn = mapping if callable(mapping) else mapping.__getitem__
    return SimplicialComplex([[fn(v) for v in f] for f in c.facets], name=c.name)


def is_isomorphic(c1: SimplicialComplex, c2: SimplicialComplex) -> bool:
    """Combinatorial isomorphism via the vertex/facet incidence graph."""
    if c1.f_vector != c2.f_vector:
        return False
    return nx.is_isomorphic(_incidence(c1), _incidence(c2), node_match=lambda x, y: x["kind"] == y["kind"])


def _incidence(c):
    g = nx.Graph()
    for v in c.vertices:
        g.add_node(("v", v), kind=0)
    for i, f in enumerate(c.facets):
        g.add_node(("f", i), kind=1)
        g.add_edges_from((("f", i), ("v", v)) for v in f)
    return g


# -- named complexes ----------------------------------------------------------

def _tokens(n):
    width = len(str(n - 1))
    return [str(i).zfill(width) for i in range(n)]


def cycle(k: int) -> SimplicialComplex:
    if k < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    t = _tokens(k)
    return SimplicialComplex([(t[i], t[(i + 1) % k]) for i in range(k)], name=f"cycle_{k}")


def path(k: int) -> SimplicialComplex:
    t = _tokens(k)
    if k == 1:
        return SimplicialComplex([t], name="path_1")
    return SimplicialComplex([(t[i], t[i + 1]) for i in range(k - 1)], name=f"path_{k}")


def simplex(d: int) -> SimplicialComplex:
    return SimplicialComplex([_tokens(d + 1)], name=f"simplex_{d}")


def sphere_boundary(d: int) -> SimplicialComplex:
    """The d-sphere as the boundary of the (d+1)-simplex."""
    t = _tokens(d + 2)
    return SimplicialComplex(itertools.combinations(t, d + 1), name=f"sphere_boundary_{d}")


def octahedron() -> SimplicialComplex:
    c = SimplicialComplex(
        [(a + "+" if sa else a + "-", b + "+" if sb else b + "-", x + "+" if sx else x + "-")
         for a, b, x in [("x", "y", "z")]
         for sa in (0, 1) for sb in (0, 1) for sx in (0, 1)],
        name="octahedron",
    )
    return c


RP2_6_FACETS = [
    (1, 2, 4), (1, 2, 6), (1, 3, 5), (1, 3, 6), (1, 4, 5),
    (2, 3, 4), (2, 3, 5), (2, 5, 6), (3, 4, 6), (4, 5, 6),
]


def rp2_6() -> SimplicialComplex:
    """The 6-vertex triangulation of the real projective plane (K6 skeleton)."""
    return SimplicialComplex([[str(v) for v in f] for f in RP2_6_FACETS], name="rp2_6")


def flagify_by_edge_subdivision(c: SimplicialComplex, name=None, max_depth=12) -> SimplicialComplex:
    """Subdivide edges until flag, using as few subdivisions as possible.

    An empty triangle disappears only when one of its own edges is
    subdivided, so flagifications are found by branching on the three edges
    of the lexicographically first empty triangle, deepening the search one
    level at a time.  Branches are tried in lex edge order, so the result is
    deterministic.  New vertices are ``w0, w1, ...``.  If no sequence of at
    most ``max_depth`` subdivisions works, falls back to
    :func:`greedy_flagify`.
    """
    def search(cx, depth, k):
        empties = empty_triangles(cx)
        if not empties:
            return cx if is_flag(cx) else None
        if depth == 0:
            return None
        for edge in itertools.combinations(empties[0], 2):
            found = search(subdivide_edge(cx, edge, new_vertex=_fresh(cx, f"w{k}")), depth - 1, k + 1)
            if found is not None:
                return found
        return None

    for depth in range(max_depth + 1):
        found = search(c, depth, 0)
        if found is not None:
            return SimplicialComplex(found.facets, name=name)
    return greedy_flagify(c, name=name)


def greedy_flagify(c: SimplicialComplex, name=None) -> SimplicialComplex:
    """Subdivide edges until flag, greedily hitting empty triangles.

    Each round subdivides the edge lying in the most empty triangles, ties to
    the lexicographically lowest edge.
    """
    count = 0
    while True:
        empties = empty_triangles(c)
        if not empties and is_flag(c):
            break
        if not empties:
            # larger empty simplices without empty triangles: hit a clique edge
            q = next(tuple(sorted(q)) for q in nx.find_cliques(c.graph) if tuple(q) not in c)
            edge = q[:2]
        else:
            hits = Counter()
            for t in empties:
                for e in itertools.combinations(t, 2):
                    hits[e] += 1
            edge = min(hits, key=lambda e: (-hits[e], e))
        c = subdivide_edge(c, edge, new_vertex=_fresh(c, f"w{count}"))
        count += 1
    return SimplicialComplex(c.facets, name=name)


def rp2_flag() -> SimplicialComplex:
    """A flag triangulation of RP^2 built from :func:`rp2_6` by edge subdivision."""
    return flagify_by_edge_subdivision(rp2_6(), name="rp2_flag")


def moore(p: int) -> SimplicialComplex:
    """Simplicial Moore space S^1 u_p D^2 (H_1 = Z/p), generally not flag.

    Mapping cone of the degree-p simplicial map from a 3p-cycle ``a*`` onto a
    3-cycle ``b*`` (a_i -> b_{i mod 3}): the mapping cylinder is triangulated
    prism by prism and the 3p-cycle is coned off to the apex ``c``.
    """
    if p < 2:
        raise ValueError("moore(p) needs p >= 2")
    n = 3 * p
    w = len(str(n - 1))
    a = [f"a{str(i).zfill(w)}" for i in range(n)]
    b = ["b0", "b1", "b2"]
    facets = []
    for i in range(n):
        j = (i + 1) % n
        facets.append((a[i], a[j], b[j % 3]))
        facets.append((a[i], b[i % 3], b[j % 3]))
        facets.append(("c", a[i], a[j]))
    return SimplicialComplex(facets, name=f"moore_{p}")


def icosahedron() -> SimplicialComplex:
    """Boundary of the icosahedron: a flag 12-vertex 2-sphere."""
    top, bot = "n", "s"
    up = [f"u{i}" for i in range(5)]
    lo = [f"l{i}" for i in range(5)]
    facets = []
    for i in range(5):
        j = (i + 1) % 5
        facets += [(top, up[i], up[j]), (bot, lo[i], lo[j]), (up[i], up[j], lo[i]), (lo[i], lo[j], up[j])]
    return SimplicialComplex(facets, name="icosahedron")


_PARAM = re.compile(r"^([a-z_0-9]+?)(?:_|\()(\d+)\)?$")

_FIXED = {
    "point": lambda: SimplicialComplex([("0",)], name="point"),
    "s0": lambda: SimplicialComplex([("0",), ("1",)], name="s0"),
    "octahedron": octahedron,
    "icosahedron": icosahedron,
    "rp2_6": rp2_6,
    "rp2_flag": rp2_flag,
}

_FAMILIES = {
    "cycle": (cycle, 4),
    "path": (path, 1),
    "simplex": (simplex, 0),
    "sphere_boundary": (sphere_boundary, 0),
    "moore": (moore, 2),
}

_CACHE: dict[str, SimplicialComplex] = {}


def builtin(name: str) -> SimplicialComplex:
    """Named complex from the catalog; see :func:`library`.

    Parametrised names accept ``family_k`` or ``family(k)``.
    """
    key = name.strip()
    if key in _CACHE:
        return _CACHE[key]
    if key in _FIXED:
        c = _FIXED[key]()
    else:
        m = _PARAM.match(key)
        if not m or m.group(1) not in _FAMILIES:
            raise KeyError(f"unknown builtin complex {name!r}")
        fn, lo = _FAMILIES[m.group(1)]
        k = int(m.group(2))
        if k < lo:
            raise KeyError(f"{m.group(1)} needs parameter >= {lo}")
        c = fn(k)
    _CACHE[key] = c
    return c


def library() -> dict[str, str]:
    """Catalog of builtin names with one-line descriptions."""
    return {
        "point": "single vertex",
        "s0": "two points (0-sphere)",
        "cycle_k": "k-gon, k >= 4 (flag circle)",
        "path_k": "path on k vertices",
        "simplex_d": "full d-simplex",
        "sphere_boundary_d": "boundary of the (d+1)-simplex, a d-sphere",
        "octahedron": "boundary of the 3-dimensional cross-polytope (flag 2-sphere)",
        "icosahedron": "boundary of the icosahedron (flag 2-sphere)",
        "rp2_6": "6-vertex real projective plane (not flag)",
        "rp2_flag": "flag real projective plane: fewest edge subdivisions of rp2_6 (12 vertices)",
        "moore_p": "triangulated mod-p Moore space (H_1 = Z/p), p >= 2, not flag",
    }


def default_suite() -> list[str]:
    """Library instances exercised by the property and acceptance suites."""
    return [
        "point", "s0", "path_3", "cycle_4", "cycle_5", "cycle_6", "simplex_2",
        "sphere_boundary_1", "sphere_boundary_2", "octahedron", "icosahedron",
        "rp2_6", "rp2_flag", "moore_2", "moore_3",
    ]


# -- file format --------------------------------------------------------------

def dumps(c: SimplicialComplex) -> str:
    lines = [f"# {c.name}"] if c.name else []
    lines += [" ".join(f) for f in c.facets]
    return "\n".join(lines) + "\n"


def loads(text: str, name=None) -> SimplicialComplex:
    facets = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        facets.append(line.split())
    return build_complex(facets, name=name)


def save(c: SimplicialComplex, path) -> None:
    Path(path).write_text(dumps(c), encoding="utf-8")


def load(path, name=None) -> SimplicialComplex:
    path = Path(path)
    return loads(path.read_text(encoding="utf-8"), name=name or path.stem)
