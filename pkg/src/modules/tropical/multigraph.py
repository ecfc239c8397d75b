#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
半辺表現による連結多重グラフ

ループと多重辺を許す連結グラフを扱います。辺 e は 2 本の半辺 2e, 2e+1 からなり、
半辺 h の相方は h ^ 1、h の属する辺は h // 2 です。縮約しても生き残った辺と
半辺の番号は変わらないため、フィルトレーションをそのまま射影できます。

テキスト形式 (キャッシュと CLI の共通形式):

    v=3
    e0: 0 1
    e1: 1 2
    e2: 2 2
"""

from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.utils import UnionFind

from src.utils.error_handler import GraphStructureError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)

EdgeSet = FrozenSet[int]


def mate(h: int) -> int:
    """半辺 h の相方"""
    return h ^ 1


def edge_of(h: int) -> int:
    return h // 2


@dataclass(frozen=True)
class MultiGraph:
    """
    連結な有限多重グラフ

    Attributes:
        vertices: 頂点番号 (昇順)
        edges: (辺番号, 半辺 2e の頂点, 半辺 2e+1 の頂点) のタプル (辺番号の昇順)
    """

    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int, int], ...]
    _vertex_of: Dict[int, int] = field(init=False, repr=False, compare=False, hash=False)
    _halves_at: Dict[int, Tuple[int, ...]] = field(init=False, repr=False, compare=False, hash=False)
    _ends: Dict[int, Tuple[int, int]] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        vertices = tuple(sorted(self.vertices))
        edges = tuple(sorted((int(e), int(u), int(w)) for e, u, w in self.edges))
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)

        if not vertices:
            raise GraphStructureError("頂点のないグラフは扱えません")
        if len(set(vertices)) != len(vertices):
            raise GraphStructureError(f"頂点番号が重複しています: {vertices}")
        if len({e for e, _, _ in edges}) != len(edges):
            raise GraphStructureError("辺番号が重複しています")
        if len(vertices) == 1 and not edges:
            raise GraphStructureError("辺のない 1 頂点グラフ (種数 0) は扱えません")

        vertex_set = set(vertices)
        vertex_of: Dict[int, int] = {}
        halves_at: Dict[int, List[int]] = {v: [] for v in vertices}
        ends: Dict[int, Tuple[int, int]] = {}
        for e, u, w in edges:
            if e < 0 or u not in vertex_set or w not in vertex_set:
                raise GraphStructureError(f"辺 e{e} の端点が不正です: {u} {w}")
            vertex_of[2 * e] = u
            vertex_of[2 * e + 1] = w
            halves_at[u].append(2 * e)
            halves_at[w].append(2 * e + 1)
            ends[e] = (u, w)

        object.__setattr__(self, "_vertex_of", vertex_of)
        object.__setattr__(self, "_halves_at", {v: tuple(sorted(hs)) for v, hs in halves_at.items()})
        object.__setattr__(self, "_ends", ends)

        if not nx.is_connected(self.to_networkx()):
            raise GraphStructureError("グラフが連結ではありません")

    # ------------------------------------------------------------------
    # 構成
    # ------------------------------------------------------------------
    @classmethod
    def from_edge_list(cls, pairs: Sequence[Tuple[int, int]], vertices: Optional[Iterable[int]] = None) -> "MultiGraph":
        """
        端点の組のリストから辺番号 0, 1, ... を振ってグラフを作る

        Args:
            pairs: (u, w) のリスト。u == w はループ
            vertices: 頂点番号 (省略時は端点から推定)
        """
        vs = set(vertices) if vertices is not None else {x for p in pairs for x in p}
        return cls(tuple(vs), tuple((i, u, w) for i, (u, w) in enumerate(pairs)))

    @classmethod
    def from_text(cls, text: str) -> "MultiGraph":
        """
        テキスト形式から読み込む

        Raises:
            GraphStructureError: 形式が不正な場合
        """
        lines = [line.strip() for line in text.strip().splitlines() if line.strip()]
        if not lines or not lines[0].startswith("v="):
            raise GraphStructureError("先頭行は v=<頂点数> である必要があります")
        try:
            k = int(lines[0][2:])
            edges = []
            for line in lines[1:]:
                label, rest = line.split(":", 1)
                if not label.startswith("e"):
                    raise ValueError(label)
                u, w = rest.split()
                edges.append((int(label[1:]), int(u), int(w)))
        except ValueError as e:
            raise GraphStructureError(f"グラフのテキスト形式を解釈できません: {e}") from e
        return cls(tuple(range(k)), tuple(edges))

    def to_text(self) -> str:
        """テキスト形式に書き出す (頂点は 0..k-1 に詰め直し、辺番号は保存)"""
        index = {v: i for i, v in enumerate(self.vertices)}
        lines = [f"v={len(self.vertices)}"]
        lines += [f"e{e}: {index[u]} {index[w]}" for e, u, w in self.edges]
        return "\n".join(lines)

    def to_networkx(self) -> nx.MultiGraph:
        """辺番号をキーとする networkx の MultiGraph"""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        for e, u, w in self.edges:
            graph.add_edge(u, w, key=e)
        return graph

    def to_dot(self, name: str = "G") -> str:
        """DOT 形式 (図の再現用)"""
        graph = self.to_networkx()
        graph.graph["name"] = name
        for u, w, key, data in graph.edges(keys=True, data=True):
            data["label"] = f"e{key}"
        return nx.nx_pydot.to_pydot(graph).to_string()

    # ------------------------------------------------------------------
    # 基本量
    # ------------------------------------------------------------------
    @property
    def edge_ids(self) -> Tuple[int, ...]:
        return tuple(e for e, _, _ in self.edges)

    @property
    def half_edges(self) -> Tuple[int, ...]:
        return tuple(h for e, _, _ in self.edges for h in (2 * e, 2 * e + 1))

    def vertex_of(self, h: int) -> int:
        return self._vertex_of[h]

    def ends(self, e: int) -> Tuple[int, int]:
        return self._ends[e]

    def halves_at(self, v: int) -> Tuple[int, ...]:
        return self._halves_at[v]

    def valency(self, v: int) -> int:
        """頂点の価数 (ループは 2 と数える)"""
        return len(self._halves_at[v])

    def is_loop(self, e: int) -> bool:
        u, w = self._ends[e]
        return u == w

    def loops_at(self, v: int) -> int:
        return sum(1 for h in self._halves_at[v] if h % 2 == 0 and self.is_loop(edge_of(h)))

    def edge_set(self, ids: Iterable[int]) -> EdgeSet:
        """
        辺番号の集合を検証して EdgeSet にする

        Raises:
            GraphStructureError: 存在しない辺番号を含む場合
        """
        result = frozenset(ids)
        unknown = result - set(self._ends)
        if unknown:
            raise GraphStructureError(f"存在しない辺番号です: {sorted(unknown)}")
        return result

    def genus(self) -> int:
        """種数 |E| - |V| + 1"""
        return len(self.edges) - len(self.vertices) + 1

    def bridges(self) -> EdgeSet:
        """取り除くとグラフが非連結になる辺の集合 (ループは橋にならない)"""
        multiplicity: Dict[FrozenSet[int], List[int]] = {}
        for e, u, w in self.edges:
            if u != w:
                multiplicity.setdefault(frozenset((u, w)), []).append(e)

        simple = nx.Graph()
        simple.add_nodes_from(self.vertices)
        simple.add_edges_from(tuple(pair) for pair in multiplicity)

        result = set()
        for u, w in nx.bridges(simple):
            parallel = multiplicity[frozenset((u, w))]
            if len(parallel) == 1:
                result.add(parallel[0])
        return frozenset(result)

    def is_stable(self) -> bool:
        """橋がなく、価数 2 の頂点はループに隣接するもののみ"""
        if self.bridges():
            return False
        for v in self.vertices:
            k = self.valency(v)
            if k < 2 or (k == 2 and self.loops_at(v) == 0):
                return False
        return True

    def is_forest(self, edges: Iterable[int]) -> bool:
        """辺集合が閉路を含まないか (ループや多重辺の対は閉路)"""
        components = UnionFind(self.vertices)
        for e in self.edge_set(edges):
            u, w = self._ends[e]
            if components[u] == components[w]:
                return False
            components.union(u, w)
        return True

    def contract(self, edges: Iterable[int]) -> "MultiGraph":
        """
        森を縮約したグラフ G/s を返す

        生き残った辺・半辺の番号はそのまま、頂点は各同値類の最小番号で代表します。

        Raises:
            GraphStructureError: s が森でない場合
        """
        forest = self.edge_set(edges)
        if not self.is_forest(forest):
            raise GraphStructureError(f"森でない辺集合は縮約できません: {sorted(forest)}")
        rep = self.contraction_map(forest)
        survivors = tuple((e, rep[u], rep[w]) for e, u, w in self.edges if e not in forest)
        return MultiGraph(tuple(sorted(set(rep.values()))), survivors)

    def contraction_map(self, forest: Iterable[int]) -> Dict[int, int]:
        """縮約で頂点がどの代表頂点に移るか"""
        components = UnionFind(self.vertices)
        for e in forest:
            u, w = self._ends[e]
            components.union(u, w)
        classes: Dict[int, int] = {}
        for v in self.vertices:
            root = components[v]
            classes[root] = min(classes.get(root, v), v)
        return {v: classes[components[v]] for v in self.vertices}


@dataclass(frozen=True)
class FilteredGraph:
    """
    辺の順序付き分割 π = (E_1, ..., E_m) を持つグラフ

    Attributes:
        graph: 台となるグラフ
        blocks: 空でない互いに素なブロックの列で E(G) を覆う
    """

    graph: MultiGraph
    blocks: Tuple[EdgeSet, ...]
    _block_of: Dict[int, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        blocks = tuple(frozenset(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)

        block_of: Dict[int, int] = {}
        for i, block in enumerate(blocks):
            if not block:
                raise GraphStructureError(f"ブロック {i + 1} が空です")
            for e in block:
                if e in block_of:
                    raise GraphStructureError(f"辺 e{e} が複数のブロックに含まれています")
                block_of[e] = i
        if set(block_of) != set(self.graph.edge_ids):
            raise GraphStructureError("ブロックが辺集合の分割になっていません")
        object.__setattr__(self, "_block_of", block_of)

    @classmethod
    def trivial(cls, graph: MultiGraph) -> "FilteredGraph":
        """深さ 1 の (全ての辺が 1 ブロック) フィルトレーション"""
        return cls(graph, (frozenset(graph.edge_ids),))

    @property
    def depth(self) -> int:
        return len(self.blocks)

    def block_of(self, e: int) -> int:
        """辺の属するブロック番号 (0 始まり)"""
        return self._block_of[e]

    def is_filtered_by_forests(self) -> bool:
        """E_1 ∪ ... ∪ E_j が j ≤ m-1 の全てで森か"""
        prefix: set = set()
        for block in self.blocks[:-1]:
            prefix |= block
            if not self.graph.is_forest(prefix):
                return False
        return True

    def forest(self) -> EdgeSet:
        """最後のブロック以外の和集合"""
        return frozenset().union(*self.blocks[:-1]) if self.depth > 1 else frozenset()

    def shrink(self) -> "FilteredGraph":
        """
        E_1 を縮約して (G/E_1, (E_2, ..., E_m)) を返す

        Raises:
            GraphStructureError: 深さ 1 の場合
        """
        if self.depth < 2:
            raise GraphStructureError("深さ 1 のフィルトレーションは縮約できません")
        return FilteredGraph(self.graph.contract(self.blocks[0]), self.blocks[1:])

    def merge(self, k: int) -> "FilteredGraph":
        """
        隣り合うブロック E_k と E_{k+1} (1 始まり) を併合する

        Raises:
            GraphStructureError: k が 1..m-1 の範囲外の場合
        """
        if not 1 <= k < self.depth:
            raise GraphStructureError(f"併合できるブロック番号は 1..{self.depth - 1} です: {k}")
        merged = self.blocks[k - 1] | self.blocks[k]
        return FilteredGraph(self.graph, self.blocks[:k - 1] + (merged,) + self.blocks[k + 1:])

    def blocks_as_lists(self) -> List[List[int]]:
        return [sorted(b) for b in self.blocks]
