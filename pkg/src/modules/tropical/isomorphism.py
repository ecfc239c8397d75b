#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
(フィルトレーション付き) 多重グラフの正準形と自己同型群

個別化・細分化 (individualization-refinement) で頂点の離散的な彩色 (葉) を全て列挙し、
辺のコード列が最小となる葉から正準グラフを作ります。

- 初期色: (価数, ループ数, 接続する半辺のブロック番号の多重集合)
- 細分化: (色, 接続する半辺ごとの (ブロック, 隣接頂点の色) の多重集合) で順位を付け直す
- 葉のコード: (頂点数, 辺ごとの (ブロック, 小さい位置, 大きい位置) の整列列)

自己同型群は「最小コードの葉の数 × 頂点を固定する正準グラフの自己同型の数」であり、
後者は同じ (ブロック, 位置, 位置) を持つ辺の置換 (ループなら向きの反転も) からなります。
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from src.modules.tropical.multigraph import EdgeSet, FilteredGraph, MultiGraph, edge_of
from src.utils.error_handler import GraphStructureError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

Code = Tuple[int, Tuple[Tuple[int, int, int], ...]]
GraphLike = Union[MultiGraph, FilteredGraph]

# この位数以下なら群の元を全て列挙して保持する
ELEMENT_LIMIT = 50000


def as_filtered(graph: GraphLike, blocks: Optional[Sequence[EdgeSet]] = None) -> FilteredGraph:
    """
    MultiGraph とブロック列 (省略可) を FilteredGraph にまとめる

    Raises:
        GraphStructureError: ブロック列が辺集合の分割でない場合
    """
    if isinstance(graph, FilteredGraph):
        if blocks is not None:
            return FilteredGraph(graph.graph, tuple(blocks))
        return graph
    if blocks is None:
        return FilteredGraph.trivial(graph)
    return FilteredGraph(graph, tuple(blocks))


@dataclass(frozen=True, order=True)
class CanonicalForm:
    """同型類の全順序キー (フィルトレーション付きなら順序を保つ同型のみで不変)"""

    bytes: bytes

    @classmethod
    def from_code(cls, code: Code) -> "CanonicalForm":
        n, keys = code
        flat = [n, len(keys)] + [x for key in keys for x in key]
        if max(flat, default=0) > 255:
            raise GraphStructureError("正準形に符号化できない大きさのグラフです")
        return cls(bytes(flat))

    @classmethod
    def from_hex(cls, text: str) -> "CanonicalForm":
        return cls(bytes.fromhex(text))

    @property
    def hex(self) -> str:
        return self.bytes.hex()

    def __str__(self) -> str:
        return self.hex


class Automorphism:
    """
    半辺の置換として表した同型写像 (頂点写像も保持)

    相方との対合と頂点の接続関係と可換です。
    """

    __slots__ = ("vertex_map", "half_map", "_key")

    def __init__(self, vertex_map: Dict[int, int], half_map: Dict[int, int]):
        self.vertex_map = dict(vertex_map)
        self.half_map = dict(half_map)
        self._key = tuple(sorted(self.half_map.items())) + tuple(sorted(self.vertex_map.items()))

    @classmethod
    def identity(cls, graph: MultiGraph) -> "Automorphism":
        return cls({v: v for v in graph.vertices}, {h: h for h in graph.half_edges})

    def vertex(self, v: int) -> int:
        return self.vertex_map[v]

    def half(self, h: int) -> int:
        return self.half_map[h]

    def edge(self, e: int) -> int:
        return edge_of(self.half_map[2 * e])

    def flips(self, e: int) -> bool:
        """辺 e を向きを反転して自分自身に移すか"""
        return self.half_map[2 * e] == 2 * e + 1

    def edge_set(self, edges: EdgeSet) -> EdgeSet:
        return frozenset(self.edge(e) for e in edges)

    def compose(self, other: "Automorphism") -> "Automorphism":
        """self ∘ other (先に other を作用させる)"""
        return Automorphism(
            {v: self.vertex_map[w] for v, w in other.vertex_map.items()},
            {h: self.half_map[k] for h, k in other.half_map.items()},
        )

    def inverse(self) -> "Automorphism":
        return Automorphism(
            {w: v for v, w in self.vertex_map.items()},
            {k: h for h, k in self.half_map.items()},
        )

    def is_identity(self) -> bool:
        return all(h == k for h, k in self.half_map.items()) and all(v == w for v, w in self.vertex_map.items())

    def is_automorphism_of(self, fg: FilteredGraph) -> bool:
        """接続関係・相方・ブロック番号を保つか"""
        graph = fg.graph
        for h, k in self.half_map.items():
            if self.vertex_map[graph.vertex_of(h)] != graph.vertex_of(k):
                return False
            if self.half_map[h ^ 1] != k ^ 1:
                return False
            if fg.block_of(edge_of(h)) != fg.block_of(edge_of(k)):
                return False
        return sorted(self.half_map.values()) == sorted(graph.half_edges)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Automorphism) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def __repr__(self) -> str:
        moved = {h: k for h, k in self.half_map.items() if h != k}
        return f"Automorphism(half={moved})"


@dataclass(frozen=True)
class CanonicalLabeling:
    """
    正準形と、入力から正準グラフへの同型写像

    Attributes:
        form: 正準形
        vertex_map: 入力の頂点 → 正準グラフの頂点 (0..n-1)
        half_map: 入力の半辺 → 正準グラフの半辺
        graph: 正準グラフ (辺 i は半辺 2i (小さい位置), 2i+1)
    """

    form: CanonicalForm
    vertex_map: Dict[int, int]
    half_map: Dict[int, int]
    graph: FilteredGraph

    @property
    def isomorphism(self) -> Automorphism:
        return Automorphism(self.vertex_map, self.half_map)

    def edge(self, e: int) -> int:
        return edge_of(self.half_map[2 * e])


class _Search:
    """個別化・細分化の探索木"""

    def __init__(self, fg: FilteredGraph):
        self.fg = fg
        graph = fg.graph
        self.vertices = graph.vertices
        self.index = {v: i for i, v in enumerate(self.vertices)}
        self.n = len(self.vertices)
        # 頂点ごとの (ブロック, 相手側の頂点) (半辺ごと)
        self.adjacency: List[List[Tuple[int, int]]] = [[] for _ in range(self.n)]
        for e, u, w in graph.edges:
            b = fg.block_of(e)
            self.adjacency[self.index[u]].append((b, self.index[w]))
            self.adjacency[self.index[w]].append((b, self.index[u]))

    def initial_colors(self) -> List[int]:
        graph = self.fg.graph
        keys = []
        for v in self.vertices:
            blocks = tuple(sorted(self.fg.block_of(edge_of(h)) for h in graph.halves_at(v)))
            keys.append((graph.valency(v), graph.loops_at(v), blocks))
        return _rank(keys)

    def refine(self, colors: List[int]) -> List[int]:
        classes = len(set(colors))
        while True:
            signatures = [
                (colors[v], tuple(sorted((b, colors[o]) for b, o in self.adjacency[v])))
                for v in range(self.n)
            ]
            colors = _rank(signatures)
            count = len(set(colors))
            if count == classes:
                return colors
            classes = count

    def leaves(self) -> Dict[Tuple[int, ...], Code]:
        """到達する全ての葉 (離散彩色) とそのコード"""
        found: Dict[Tuple[int, ...], Code] = {}
        stack = [self.refine(self.initial_colors())]
        while stack:
            colors = stack.pop()
            if len(set(colors)) == self.n:
                key = tuple(colors)
                if key not in found:
                    found[key] = self.code(colors)
                continue
            sizes: Dict[int, int] = {}
            for c in colors:
                sizes[c] = sizes.get(c, 0) + 1
            target = min(c for c, size in sizes.items() if size > 1)
            for v in range(self.n):
                if colors[v] == target:
                    individualized = _rank([(colors[u], 0 if u == v else 1) for u in range(self.n)])
                    stack.append(self.refine(individualized))
        return found

    def code(self, positions: Sequence[int]) -> Code:
        keys = []
        for e, u, w in self.fg.graph.edges:
            pu, pw = positions[self.index[u]], positions[self.index[w]]
            keys.append((self.fg.block_of(e), min(pu, pw), max(pu, pw)))
        return (self.n, tuple(sorted(keys)))

    def labeling(self, positions: Sequence[int]) -> Tuple[Dict[int, int], Dict[int, int]]:
        """葉から正準グラフへの同型 (頂点写像, 半辺写像)"""
        fg = self.fg
        vertex_map = {v: positions[i] for i, v in enumerate(self.vertices)}
        keyed = []
        for e, u, w in fg.graph.edges:
            pu, pw = vertex_map[u], vertex_map[w]
            keyed.append(((fg.block_of(e), min(pu, pw), max(pu, pw)), e, pu, pw))
        keyed.sort()
        half_map: Dict[int, int] = {}
        for i, (_, e, pu, pw) in enumerate(keyed):
            if pu <= pw:
                half_map[2 * e], half_map[2 * e + 1] = 2 * i, 2 * i + 1
            else:
                half_map[2 * e], half_map[2 * e + 1] = 2 * i + 1, 2 * i
        return vertex_map, half_map


def _rank(keys: Sequence) -> List[int]:
    order = {key: i for i, key in enumerate(sorted(set(keys)))}
    return [order[key] for key in keys]


def _canonical_graph(code: Code) -> FilteredGraph:
    n, keys = code
    graph = MultiGraph(tuple(range(n)), tuple((i, pu, pw) for i, (_, pu, pw) in enumerate(keys)))
    depth = max(b for b, _, _ in keys) + 1
    blocks = tuple(frozenset(i for i, key in enumerate(keys) if key[0] == b) for b in range(depth))
    return FilteredGraph(graph, blocks)


class AutGroup:
    """
    (フィルトレーション付き) グラフの自己同型群

    位数は元を列挙せずに求まります。元の列挙は遅延評価で、
    ELEMENT_LIMIT を超える群では生成元のみを使う処理 (軌道計算) を想定しています。
    """

    def __init__(self, fg: FilteredGraph, leaves: List[Tuple[Dict[int, int], Dict[int, int]]],
                 tie_groups: List[Tuple[Tuple[int, ...], bool]]):
        self.fg = fg
        self._leaves = leaves
        self._tie_groups = tie_groups
        self._elements: Optional[List[Automorphism]] = None
        base_vertex, base_half = leaves[0]
        self._inv_vertex = {p: v for v, p in base_vertex.items()}
        self._inv_half = {p: h for h, p in base_half.items()}

    @property
    def order(self) -> int:
        stabilizer = 1
        for edges, is_loop in self._tie_groups:
            k = len(edges)
            stabilizer *= math.factorial(k) * (2 ** k if is_loop else 1)
        return len(self._leaves) * stabilizer

    def __len__(self) -> int:
        return self.order

    def _canonical_stabilizer(self) -> Iterator[Dict[int, int]]:
        """頂点を固定する正準グラフの自己同型 (半辺写像)"""
        per_group = []
        for edges, is_loop in self._tie_groups:
            options = []
            for perm in itertools.permutations(edges):
                flip_choices = itertools.product((0, 1), repeat=len(edges)) if is_loop else [(0,) * len(edges)]
                for flips in flip_choices:
                    mapping = {}
                    for src, dst, f in zip(edges, perm, flips):
                        mapping[2 * src] = 2 * dst + f
                        mapping[2 * src + 1] = 2 * dst + 1 - f
                    options.append(mapping)
            per_group.append(options)
        for combo in itertools.product(*per_group):
            merged: Dict[int, int] = {}
            for mapping in combo:
                merged.update(mapping)
            yield merged

    def _element(self, leaf: Tuple[Dict[int, int], Dict[int, int]], psi: Dict[int, int]) -> Automorphism:
        vertex_map, half_map = leaf
        return Automorphism(
            {v: self._inv_vertex[p] for v, p in vertex_map.items()},
            {h: self._inv_half[psi.get(p, p)] for h, p in half_map.items()},
        )

    def __iter__(self) -> Iterator[Automorphism]:
        if self._elements is not None:
            yield from self._elements
            return
        for leaf in self._leaves:
            for psi in self._canonical_stabilizer():
                yield self._element(leaf, psi)

    @property
    def elements(self) -> List[Automorphism]:
        """
        全ての元 (単位元が先頭)

        Raises:
            GraphStructureError: 位数が ELEMENT_LIMIT を超える場合
        """
        if self._elements is None:
            if self.order > ELEMENT_LIMIT:
                raise GraphStructureError(
                    f"位数 {self.order} の群の元は列挙しません (生成元を使ってください)"
                )
            self._elements = list(iter(self))
        return self._elements

    def generators(self) -> List[Automorphism]:
        """群を生成する元の集合"""
        gens = [self._element(leaf, {}) for leaf in self._leaves[1:]]
        for edges, is_loop in self._tie_groups:
            for a, b in zip(edges, edges[1:]):
                gens.append(self._element(self._leaves[0], {2 * a: 2 * b, 2 * a + 1: 2 * b + 1,
                                                            2 * b: 2 * a, 2 * b + 1: 2 * a + 1}))
            if is_loop:
                a = edges[0]
                gens.append(self._element(self._leaves[0], {2 * a: 2 * a + 1, 2 * a + 1: 2 * a}))
        return gens or [Automorphism.identity(self.fg.graph)]

    def edge_orbits(self, edge_sets: Sequence[EdgeSet]) -> List[List[EdgeSet]]:
        """
        辺集合の族を群作用の軌道に分ける (生成元のみ使用)

        Returns:
            List[List[EdgeSet]]: 各軌道 (元の順序を保ち、軌道は最初の出現順)
        """
        remaining = {frozenset(s) for s in edge_sets}
        gens = self.generators()
        orbits: List[List[EdgeSet]] = []
        for start in edge_sets:
            start = frozenset(start)
            if start not in remaining:
                continue
            orbit = {start}
            frontier = [start]
            while frontier:
                current = frontier.pop()
                for gen in gens:
                    image = gen.edge_set(current)
                    if image not in orbit:
                        orbit.add(image)
                        frontier.append(image)
            remaining -= orbit
            orbits.append([s for s in edge_sets if frozenset(s) in orbit])
        return orbits


def _analyse(fg: FilteredGraph):
    search = _Search(fg)
    leaves = search.leaves()
    best = min(leaves.values())
    minimal = sorted(pos for pos, code in leaves.items() if code == best)
    return search, best, minimal


def canonical_labeling(graph: GraphLike, blocks: Optional[Sequence[EdgeSet]] = None) -> CanonicalLabeling:
    """
    正準形と入力から正準グラフへの同型を求める

    Args:
        graph: グラフまたはフィルトレーション付きグラフ
        blocks: 順序付き分割 (省略時は 1 ブロック)

    Raises:
        GraphStructureError: blocks が辺集合の分割でない場合
    """
    fg = as_filtered(graph, blocks)
    search, best, minimal = _analyse(fg)
    vertex_map, half_map = search.labeling(minimal[0])
    return CanonicalLabeling(CanonicalForm.from_code(best), vertex_map, half_map, _canonical_graph(best))


def canonical(graph: GraphLike, blocks: Optional[Sequence[EdgeSet]] = None) -> CanonicalForm:
    """(フィルトレーション付き) 同型のときに限り一致する正準形"""
    fg = as_filtered(graph, blocks)
    search, best, _ = _analyse(fg)
    return CanonicalForm.from_code(best)


def is_isomorphic(a: GraphLike, b: GraphLike) -> bool:
    return canonical(a) == canonical(b)


def automorphisms(graph: GraphLike, blocks: Optional[Sequence[EdgeSet]] = None) -> AutGroup:
    """
    自己同型群 (フィルトレーション付きならブロック番号を保つ元のみ)

    Raises:
        GraphStructureError: blocks が辺集合の分割でない場合
    """
    fg = as_filtered(graph, blocks)
    search, best, minimal = _analyse(fg)
    leaves = [search.labeling(pos) for pos in minimal]

    n, keys = best
    ties: Dict[Tuple[int, int, int], List[int]] = {}
    for i, key in enumerate(keys):
        ties.setdefault(key, []).append(i)
    tie_groups = [(tuple(edges), key[1] == key[2]) for key, edges in sorted(ties.items())
                  if len(edges) > 1 or key[1] == key[2]]

    group = AutGroup(fg, leaves, tie_groups)
    logger.debug(f"自己同型群: 葉 {len(leaves)} 個, 位数 {group.order}")
    return group


def induced_map_on_contraction(a: Automorphism, fg: FilteredGraph,
                               s: Optional[EdgeSet] = None) -> Automorphism:
    """
    (G, π) の自己同型が縮約 (G/E_1, (E_2, ..., E_m)) に誘導する自己同型

    Args:
        a: (G, π) の自己同型
        fg: フィルトレーション付きグラフ
        s: 縮約する辺集合 (省略時は E_1)

    Raises:
        GraphStructureError: s が E_1 と異なる場合、または a がブロックを保たない場合
    """
    if fg.depth < 2:
        raise GraphStructureError("深さ 1 のフィルトレーションには縮約がありません")
    first = fg.blocks[0]
    if s is not None and frozenset(s) != first:
        raise GraphStructureError("誘導写像は第 1 ブロック E_1 の縮約に対してのみ定義されます")
    if a.edge_set(first) != first:
        raise GraphStructureError("自己同型が第 1 ブロックを保ちません")

    rep = fg.graph.contraction_map(first)
    vertex_map = {rep[v]: rep[a.vertex(v)] for v in fg.graph.vertices}
    half_map = {h: k for h, k in a.half_map.items() if edge_of(h) not in first}
    return Automorphism(vertex_map, half_map)
