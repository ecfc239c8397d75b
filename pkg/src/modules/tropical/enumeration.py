#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
安定グラフと森によるフィルトレーションの同型類の列挙

種数 g ≥ 2 の安定グラフは全頂点の価数が 3 以上なので |V| ≤ 2g-2 です。
次数列ごとに対称な重複度行列 (対角 = ループ数) を列挙し、連結・橋なし・安定なものを
正準形で重複除去します。
"""

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

from src.modules.tropical.isomorphism import (
    CanonicalForm,
    ELEMENT_LIMIT,
    automorphisms,
    canonical_labeling,
)
from src.modules.tropical.multigraph import EdgeSet, FilteredGraph, MultiGraph
from src.utils.error_handler import GraphStructureError, UsageError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class StableClass:
    """安定グラフの同型類 (代表元は正準グラフ)"""

    representative: MultiGraph
    form: CanonicalForm
    genus: int

    @property
    def aut_order(self) -> int:
        return automorphisms(self.representative).order


@dataclass(frozen=True)
class FilteredClass:
    """森によるフィルトレーション付き安定グラフの同型類 (代表元は正準グラフ)"""

    representative: FilteredGraph
    form: CanonicalForm
    depth: int

    @property
    def dim(self) -> int:
        return self.depth - 1

    @property
    def graph(self) -> MultiGraph:
        return self.representative.graph

    @classmethod
    def of(cls, fg: FilteredGraph) -> "FilteredClass":
        labeling = canonical_labeling(fg)
        return cls(labeling.graph, labeling.form, fg.depth)


# ----------------------------------------------------------------------
# 例示用のグラフ
# ----------------------------------------------------------------------
def single_loop() -> MultiGraph:
    return MultiGraph.from_edge_list([(0, 0)])


def theta_graph() -> MultiGraph:
    """2 頂点を 3 本の辺で結んだグラフ"""
    return MultiGraph.from_edge_list([(0, 1), (0, 1), (0, 1)])


def bouquet(k: int) -> MultiGraph:
    """1 頂点に k 本のループ"""
    return MultiGraph.from_edge_list([(0, 0)] * k)


def dumbbell() -> MultiGraph:
    return MultiGraph.from_edge_list([(0, 0), (0, 1), (1, 1)])


def polygon_with_loops(k: int) -> MultiGraph:
    """k 角形の i 番目の頂点に i 本のループを付けたグラフ (全域木の軌道は k 個)"""
    pairs = [(i, (i + 1) % k) for i in range(k)]
    for i in range(k):
        pairs += [(i, i)] * (i + 1)
    return MultiGraph.from_edge_list(pairs)


def double_edged_triangle(k: int) -> MultiGraph:
    """
    a-b を二重辺にした三角形の頂点 c に k-1 本のループを付けたグラフ

    種数 k+1、全域木の軌道は 2 個です。
    """
    pairs = [(0, 1), (0, 1), (0, 2), (1, 2)] + [(2, 2)] * (k - 1)
    return MultiGraph.from_edge_list(pairs)


def double_edge_with_loops() -> MultiGraph:
    """二重辺の両端に 1 本ずつループを付けた種数 3 のグラフ"""
    return MultiGraph.from_edge_list([(0, 1), (0, 1), (0, 0), (1, 1)])


def doubled_square() -> MultiGraph:
    """向かい合う 2 辺を二重にした四角形 (種数 3、3 価)"""
    return MultiGraph.from_edge_list([(0, 1), (0, 1), (1, 2), (2, 3), (2, 3), (3, 0)])


# ----------------------------------------------------------------------
# 安定グラフ
# ----------------------------------------------------------------------
def degree_sequences(vertex_count: int, total: int, minimum: int = 3) -> Iterator[Tuple[int, ...]]:
    """各項 minimum 以上、総和 total の非増加列"""
    def extend(prefix: Tuple[int, ...], remaining: int, slots: int, cap: int):
        if slots == 0:
            if remaining == 0:
                yield prefix
            return
        for d in range(min(cap, remaining - minimum * (slots - 1)), minimum - 1, -1):
            yield from extend(prefix + (d,), remaining - d, slots - 1, d)

    yield from extend((), total, vertex_count, total)


def multiplicity_matrices(degrees: Sequence[int]) -> Iterator[Dict[Tuple[int, int], int]]:
    """
    次数列を実現する重複度 (i==j はループ数、2 倍して次数に寄与) を全て列挙する
    """
    v = len(degrees)
    pairs = [(i, j) for i in range(v) for j in range(i, v)]
    remaining = list(degrees)

    def assign(index: int, current: Dict[Tuple[int, int], int]):
        if index == len(pairs):
            if all(r == 0 for r in remaining):
                yield dict(current)
            return
        i, j = pairs[index]
        # 行 i の最後のペアでは残りを全て使い切る必要がある
        last_in_row = (j == v - 1)
        if i == j:
            upper = remaining[i] // 2
        else:
            upper = min(remaining[i], remaining[j])
        for m in range(upper, -1, -1):
            if last_in_row:
                used = 2 * m if i == j else m
                if remaining[i] - used != 0:
                    continue
            if i == j:
                remaining[i] -= 2 * m
            else:
                remaining[i] -= m
                remaining[j] -= m
            if m:
                current[(i, j)] = m
            yield from assign(index + 1, current)
            current.pop((i, j), None)
            if i == j:
                remaining[i] += 2 * m
            else:
                remaining[i] += m
                remaining[j] += m

    yield from assign(0, {})


def _graph_from_matrix(vertex_count: int, matrix: Dict[Tuple[int, int], int]):
    pairs = [pair for pair, m in sorted(matrix.items()) for _ in range(m)]
    try:
        return MultiGraph.from_edge_list(pairs, vertices=range(vertex_count))
    except GraphStructureError:
        return None


def stable_graphs(g: int) -> List[StableClass]:
    """
    種数 g の安定グラフの同型類を正準形の順に列挙する

    Raises:
        UsageError: g < 1 の場合
    """
    if g < 1:
        raise UsageError(f"種数は 1 以上である必要があります: {g}")
    if g == 1:
        labeling = canonical_labeling(single_loop())
        return [StableClass(labeling.graph.graph, labeling.form, 1)]

    found: Dict[CanonicalForm, StableClass] = {}
    for vertex_count in range(1, 2 * g - 1):
        edge_count = vertex_count + g - 1
        for degrees in degree_sequences(vertex_count, 2 * edge_count):
            for matrix in multiplicity_matrices(degrees):
                graph = _graph_from_matrix(vertex_count, matrix)
                if graph is None or not graph.is_stable():
                    continue
                labeling = canonical_labeling(graph)
                if labeling.form not in found:
                    found[labeling.form] = StableClass(labeling.graph.graph, labeling.form, g)
        logger.debug(f"種数 {g}, 頂点数 {vertex_count} まで: {len(found)} 類")

    classes = sorted(found.values(), key=lambda c: c.form)
    logger.info(f"種数 {g} の安定グラフ: {len(classes)} 類")
    return classes


# ----------------------------------------------------------------------
# 森とフィルトレーション
# ----------------------------------------------------------------------
def forests(graph: MultiGraph) -> List[EdgeSet]:
    """空集合を含む全ての森 (辺集合)"""
    edges = [e for e in graph.edge_ids if not graph.is_loop(e)]
    result: List[EdgeSet] = []

    def extend(start: int, chosen: List[int]):
        result.append(frozenset(chosen))
        for k in range(start, len(edges)):
            candidate = chosen + [edges[k]]
            if graph.is_forest(candidate):
                extend(k + 1, candidate)

    extend(0, [])
    return result


def spanning_trees(graph: MultiGraph) -> List[EdgeSet]:
    size = len(graph.vertices) - 1
    return [f for f in forests(graph) if len(f) == size]


def spanning_forest_classes(graph_or_class) -> int:
    """全域木の自己同型群による軌道の数"""
    graph = graph_or_class.representative if isinstance(graph_or_class, StableClass) else graph_or_class
    trees = spanning_trees(graph)
    return len(automorphisms(graph).edge_orbits(trees))


def ordered_partitions(items: Sequence[int]) -> Iterator[Tuple[EdgeSet, ...]]:
    """空でないブロックへの順序付き分割を全て列挙する"""
    items = list(items)
    if not items:
        return
    for labels in itertools.product(range(len(items)), repeat=len(items)):
        used = sorted(set(labels))
        if used != list(range(len(used))):
            continue
        yield tuple(frozenset(x for x, lab in zip(items, labels) if lab == b) for b in used)


def filtered_structures(c) -> List[FilteredClass]:
    """
    安定グラフ上の森によるフィルトレーションの同型類を全て列挙する

    森の軌道代表 F ごとに F の順序付き分割を作り、F の固定部分群で割ります。

    Args:
        c: StableClass または MultiGraph
    """
    graph = c.representative if isinstance(c, StableClass) else c
    group = automorphisms(graph)
    all_forests = [f for f in forests(graph) if f]
    everything = frozenset(graph.edge_ids)

    classes: List[FilteredClass] = [FilteredClass.of(FilteredGraph.trivial(graph))]
    for orbit in group.edge_orbits(all_forests):
        forest = orbit[0]
        rest = everything - forest
        members = sorted(forest)
        if group.order <= ELEMENT_LIMIT:
            stabilizer = [a for a in group.elements if a.edge_set(forest) == forest]
            for blocks in ordered_partitions(members):
                labels = _labels(blocks, members)
                if all(labels <= _labels(tuple(a.edge_set(b) for b in blocks), members) for a in stabilizer):
                    classes.append(FilteredClass.of(FilteredGraph(graph, blocks + (rest,))))
        else:
            seen = set()
            for blocks in ordered_partitions(members):
                cls = FilteredClass.of(FilteredGraph(graph, blocks + (rest,)))
                if cls.form not in seen:
                    seen.add(cls.form)
                    classes.append(cls)

    classes.sort(key=lambda x: (x.depth, x.form))
    logger.debug(f"フィルトレーション: {len(classes)} 類 (自己同型群の位数 {group.order})")
    return classes


def _labels(blocks: Sequence[EdgeSet], members: Sequence[int]) -> Tuple[int, ...]:
    block_of = {e: i for i, block in enumerate(blocks) for e in block}
    return tuple(block_of[e] for e in members)


def all_filtered_structures(classes: Sequence[StableClass], workers: int = 1) -> List[List[FilteredClass]]:
    """
    各安定グラフの filtered_structures (workers > 1 ならプロセス並列、結果の順序は入力順)
    """
    if workers <= 1 or len(classes) <= 1:
        return [filtered_structures(c) for c in classes]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(filtered_structures, classes))
