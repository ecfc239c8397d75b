#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
細分グラフ S(G,π)、その n 乗の自己同型群による商 C(G,π) と構造写像

S(G,π) は自己同型で反転される辺と全てのループに中点を入れた 1 次元複体です。
セルは次の 4 種類で、(種類, 番号) の辞書式順序で番号付けします。

- ("e", e): 細分しない辺 (1-セル)
- ("h", h): 細分した辺の半辺 h (頂点から中点まで、1-セル)
- ("m", e): 細分した辺 e の中点 (0-セル)
- ("v", v): 元の頂点 (0-セル)

キューブは n 個の印それぞれにセルを割り当てた組で、群の対角作用の軌道を
辞書式最小の組で代表します。
"""

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import sympy

from src.modules.tropical.delta_complex import Facet, FacetKind
from src.modules.tropical.isomorphism import AutGroup, Automorphism, automorphisms, canonical_labeling
from src.modules.tropical.multigraph import EdgeSet, FilteredGraph, edge_of
from src.utils.error_handler import BurnsideIntegralityError, ConsistencyError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

X = sympy.Symbol("x")

Locus = Tuple[int, ...]


class Cell(NamedTuple):
    kind: str
    ident: int

    @property
    def dim(self) -> int:
        return 1 if self.kind in ("e", "h") else 0

    def __str__(self) -> str:
        return f"{self.kind}{self.ident}"


@dataclass(frozen=True)
class CellPoly:
    """
    セル数の母関数 (coefficients[d] = d 次元セルの数)

    x = -1 での値はオイラー標数です。
    """

    coefficients: Tuple[int, ...]

    def __post_init__(self):
        coeffs = list(self.coefficients)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coefficients", tuple(coeffs) or (0,))

    @classmethod
    def from_sympy(cls, poly) -> "CellPoly":
        poly = sympy.Poly(poly, X)
        return cls(tuple(int(c) for c in reversed(poly.all_coeffs())))

    def to_sympy(self) -> sympy.Poly:
        return sympy.Poly(list(reversed(self.coefficients)), X, domain="ZZ")

    def evaluate(self, value):
        return sum(c * value ** k for k, c in enumerate(self.coefficients))

    @property
    def euler(self) -> int:
        return self.evaluate(-1)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, k: int) -> int:
        return self.coefficients[k] if 0 <= k < len(self.coefficients) else 0

    def __add__(self, other: "CellPoly") -> "CellPoly":
        size = max(len(self.coefficients), len(other.coefficients))
        return CellPoly(tuple(self[k] + other[k] for k in range(size)))

    def __sub__(self, other: "CellPoly") -> "CellPoly":
        size = max(len(self.coefficients), len(other.coefficients))
        return CellPoly(tuple(self[k] - other[k] for k in range(size)))

    def __mul__(self, other: "CellPoly") -> "CellPoly":
        return CellPoly.from_sympy(self.to_sympy() * other.to_sympy())

    def __pow__(self, n: int) -> "CellPoly":
        return CellPoly.from_sympy(self.to_sympy() ** n)

    def shift(self, k: int) -> "CellPoly":
        """x^k 倍"""
        return CellPoly((0,) * k + self.coefficients)

    def scale(self, factor: int) -> "CellPoly":
        return CellPoly(tuple(factor * c for c in self.coefficients))

    def as_list(self) -> List[int]:
        return list(self.coefficients)

    def __str__(self) -> str:
        return str(self.to_sympy().as_expr())


@dataclass(frozen=True)
class CubeOrbit:
    """C(G,π) のキューブ (軌道の辞書式最小代表)"""

    locus: Locus
    dim: int


class SubdividedGraph:
    """
    S(G,π) のセル構造と自己同型群のセル上の置換

    Attributes:
        base: フィルトレーション付きグラフ
        group: Aut(G,π)
        flipped_edges: 細分する辺 (反転される辺とループ)
        cells: セル (整列済み)
        index: セル → 番号
        dims: 番号ごとの次元
        endpoints: 1-セルの端点の番号 (0-セルは空)
        perms: group.elements と同じ順のセル置換
    """

    def __init__(self, base: FilteredGraph, group: Optional[AutGroup] = None):
        self.base = base
        self.group = group or automorphisms(base)
        graph = base.graph
        elements = self.group.elements

        flipped = {e for e in graph.edge_ids if graph.is_loop(e)}
        for a in elements:
            flipped.update(e for e in graph.edge_ids if a.flips(e))
        self.flipped_edges: EdgeSet = frozenset(flipped)

        cells = [Cell("v", v) for v in graph.vertices]
        for e in graph.edge_ids:
            if e in self.flipped_edges:
                cells += [Cell("m", e), Cell("h", 2 * e), Cell("h", 2 * e + 1)]
            else:
                cells.append(Cell("e", e))
        self.cells: List[Cell] = sorted(cells)
        self.index: Dict[Cell, int] = {c: i for i, c in enumerate(self.cells)}
        self.dims: List[int] = [c.dim for c in self.cells]

        self.endpoints: List[Tuple[int, ...]] = []
        for c in self.cells:
            if c.kind == "h":
                ends = (Cell("v", graph.vertex_of(c.ident)), Cell("m", edge_of(c.ident)))
            elif c.kind == "e":
                u, w = graph.ends(c.ident)
                ends = (Cell("v", u), Cell("v", w))
            else:
                ends = ()
            self.endpoints.append(tuple(self.index[x] for x in ends))

        self.elements: List[Automorphism] = elements
        self.perms: List[Tuple[int, ...]] = [self.permutation(a) for a in elements]

    def __len__(self) -> int:
        return len(self.cells)

    def image(self, a: Automorphism, cell: Cell) -> Cell:
        if cell.kind == "v":
            return Cell("v", a.vertex(cell.ident))
        if cell.kind == "h":
            return Cell("h", a.half(cell.ident))
        return Cell(cell.kind, a.edge(cell.ident))

    def permutation(self, a: Automorphism) -> Tuple[int, ...]:
        return tuple(self.index[self.image(a, c)] for c in self.cells)

    def poly(self) -> CellPoly:
        counts = Counter(self.dims)
        return CellPoly((counts[0], counts[1]))

    def name(self, locus: Iterable[int]) -> str:
        return " ".join(str(self.cells[c]) for c in locus)


def subdivide(fg: FilteredGraph, group: Optional[AutGroup] = None) -> SubdividedGraph:
    return SubdividedGraph(fg, group)


def _fixed_poly(perm: Sequence[int], dims: Sequence[int]) -> Tuple[int, int]:
    zero = one = 0
    for c, image in enumerate(perm):
        if image == c:
            if dims[c]:
                one += 1
            else:
                zero += 1
    return zero, one


def fixed_subcomplex(s: SubdividedGraph, a: Automorphism) -> CellPoly:
    """
    a で各点ごとに固定されるセルの母関数

    細分により反転される 1-セルは存在しないので、セルとして固定されれば各点固定です。
    """
    return CellPoly(_fixed_poly(s.permutation(a), s.dims))


class Fiber:
    """
    単体 σ 上のファイバー C(σ) = S(σ)^n / Aut(σ)

    印の数 n ごとの軌道と母関数をメモ化します。
    """

    def __init__(self, fg: FilteredGraph):
        self.fg = fg
        self.group = automorphisms(fg)
        self.subdivision = subdivide(fg, self.group)
        self._orbits: Dict[int, List[CubeOrbit]] = {}
        self._fixed = Counter(_fixed_poly(p, self.subdivision.dims) for p in self.subdivision.perms)

    @property
    def order(self) -> int:
        return self.group.order

    def fixed_polys(self) -> Counter:
        """(0-セル数, 1-セル数) → その固定部分複体を持つ元の数"""
        return Counter(self._fixed)

    def canonical_locus(self, locus: Sequence[int]) -> Locus:
        return min(tuple(p[c] for c in locus) for p in self.subdivision.perms)

    def locus_dim(self, locus: Sequence[int]) -> int:
        dims = self.subdivision.dims
        return sum(dims[c] for c in locus)

    def orbit_of(self, locus: Sequence[int]) -> CubeOrbit:
        canonical = self.canonical_locus(locus)
        return CubeOrbit(canonical, self.locus_dim(canonical))

    def orbits(self, n: int) -> List[CubeOrbit]:
        if n not in self._orbits:
            perms = self.subdivision.perms
            found = []
            for locus in itertools.product(range(len(self.subdivision)), repeat=n):
                if all(tuple(p[c] for c in locus) >= locus for p in perms):
                    found.append(CubeOrbit(locus, self.locus_dim(locus)))
            found.sort(key=lambda o: (o.dim, o.locus))
            self._orbits[n] = found
        return self._orbits[n]

    def poly(self, n: int) -> CellPoly:
        """
        重み付き Burnside の補題による (1/|Aut|) Σ_γ P(Fix γ)^n

        Raises:
            BurnsideIntegralityError: 係数が整数にならない場合
        """
        total = sympy.Poly(0, X, domain="ZZ")
        for (zero, one), count in sorted(self._fixed.items()):
            total += count * sympy.Poly(one * X + zero, X, domain="ZZ") ** n
        coefficients = [int(c) for c in reversed(total.all_coeffs())]
        order = self.order
        if any(c % order for c in coefficients):
            raise BurnsideIntegralityError(
                f"群平均が整数になりません: {coefficients} / {order}",
                {"グラフ": self.fg.graph.to_text(), "印の数": n},
            )
        return CellPoly(tuple(c // order for c in coefficients))

    def boundary_faces(self, locus: Sequence[int]) -> List[Locus]:
        """
        代表キューブの 2·dim 個の面を軌道代表にしたもの (重複あり)
        """
        faces = []
        endpoints = self.subdivision.endpoints
        for i, c in enumerate(locus):
            for end in endpoints[c]:
                face = tuple(locus[:i]) + (end,) + tuple(locus[i + 1:])
                faces.append(self.canonical_locus(face))
        return faces

    def stabilizer_fixes_pointwise(self, orbit: CubeOrbit) -> bool:
        """キューブを保つ元が各セルの端点まで固定するか"""
        endpoints = self.subdivision.endpoints
        for p in self.subdivision.perms:
            if all(p[c] == c for c in orbit.locus):
                for c in orbit.locus:
                    if any(p[x] != x for x in endpoints[c]):
                        return False
        return True

    def name(self, orbit: CubeOrbit) -> str:
        return self.subdivision.name(orbit.locus)


def fiber_poly(fg: FilteredGraph, n: int) -> CellPoly:
    return Fiber(fg).poly(n)


def cube_orbits(fg: FilteredGraph, n: int) -> List[CubeOrbit]:
    return Fiber(fg).orbits(n)


# ----------------------------------------------------------------------
# 構造写像
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class StructureImage:
    """
    ソースのキューブ軌道の像

    Attributes:
        source: ソースの軌道
        targets: 像が覆うターゲットの軌道 (重複あり)
        degenerate: 次元が落ちるか (E_1 上の 1-セルを含む)
    """

    source: CubeOrbit
    targets: Tuple[CubeOrbit, ...]
    degenerate: bool


def cell_images(source: Fiber, facet: Facet, target: Fiber) -> List[Tuple[Tuple[int, ...], bool]]:
    """
    ソースの各セルの像 (ターゲットのセル番号の候補, 潰れるか)

    Raises:
        ConsistencyError: 縮約・併合の正準形がターゲットの代表元と一致しない場合
    """
    fg = source.fg
    graph = fg.graph
    image = facet.apply(fg)
    labeling = canonical_labeling(image)
    if labeling.graph != target.fg:
        raise ConsistencyError("構造写像のターゲットが面の正準代表と一致しません", {"面": str(facet)})

    shrunk: EdgeSet = fg.blocks[0] if facet.kind is FacetKind.SHRINK else frozenset()
    rep = graph.contraction_map(shrunk)
    index = target.subdivision.index

    def vertex(v: int) -> Cell:
        return Cell("v", labeling.vertex_map[rep[v]])

    def lookup(cell: Cell) -> int:
        if cell not in index:
            raise ConsistencyError(f"ターゲットに対応するセルがありません: {cell}", {"面": str(facet)})
        return index[cell]

    result = []
    for cell in source.subdivision.cells:
        if cell.kind == "v":
            result.append(((lookup(vertex(cell.ident)),), False))
            continue
        e = cell.ident if cell.kind in ("m", "e") else edge_of(cell.ident)
        if e in shrunk:
            u, _ = graph.ends(e)
            result.append(((lookup(vertex(u)),), cell.dim == 1))
            continue
        if cell.kind == "h":
            result.append(((lookup(Cell("h", labeling.half_map[cell.ident])),), False))
        elif cell.kind == "m":
            result.append(((lookup(Cell("m", labeling.edge(e))),), False))
        else:
            full = Cell("e", labeling.edge(e))
            if full in index:
                result.append(((index[full],), False))
            else:
                halves = (Cell("h", labeling.half_map[2 * e]), Cell("h", labeling.half_map[2 * e + 1]))
                result.append((tuple(lookup(h) for h in halves), False))
    return result


def structure_map(source: Fiber, facet: Facet, target: Fiber, n: int,
                  images: Optional[List[Tuple[Tuple[int, ...], bool]]] = None) -> List[StructureImage]:
    """
    面 facet に対応する構造写像 C(σ) → C(λ) を軌道ごとに求める

    縮約では E_1 上のセルは合併された頂点に潰れ、1-セルが潰れると像の次元が落ちます。
    ソースで細分されていない辺がターゲットで細分されている場合は、両方の半辺を覆います。
    """
    images = images if images is not None else cell_images(source, facet, target)
    result = []
    for orbit in source.orbits(n):
        options = [images[c][0] for c in orbit.locus]
        degenerate = any(images[c][1] for c in orbit.locus)
        targets = tuple(target.orbit_of(choice) for choice in itertools.product(*options))
        if facet.kind is FacetKind.MERGE and degenerate:
            logger.warning(f"併合の構造写像で次元が落ちました: {source.name(orbit)}")
        result.append(StructureImage(orbit, targets, degenerate))
    return result
