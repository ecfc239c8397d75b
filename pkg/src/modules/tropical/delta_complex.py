#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
一般化単体複体 Δ_g の面束と、その構造の検証・崩壊 (collapse) の探索

Δ_g の m-単体は深さ m+1 の森によるフィルトレーション付き安定グラフの同型類です。
深さ m のセルは m 個の面を持ちます:

- d_0: E_1 を縮約 (頂点 G_1 を除く)
- d_k (k = 1..m-1): ブロック E_k と E_{k+1} を併合 (頂点 G_{k+1} を除く)

異なるセルが全ての頂点を共有しうるため、複体は頂点集合ではなく面束として保持します。
"""

import random
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx

from src.modules.tropical.enumeration import (
    FilteredClass,
    all_filtered_structures,
    stable_graphs,
)
from src.modules.tropical.isomorphism import CanonicalForm, canonical
from src.modules.tropical.multigraph import FilteredGraph
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


class FacetKind(Enum):
    SHRINK = "shrink"
    MERGE = "merge"


@dataclass(frozen=True)
class Facet:
    """面の種類と番号 (d_0 = 縮約, d_k = E_k と E_{k+1} の併合)"""

    kind: FacetKind
    index: int = 0

    @classmethod
    def d(cls, i: int) -> "Facet":
        return cls(FacetKind.SHRINK, 0) if i == 0 else cls(FacetKind.MERGE, i)

    def apply(self, fg: FilteredGraph) -> FilteredGraph:
        return fg.shrink() if self.kind is FacetKind.SHRINK else fg.merge(self.index)

    def __str__(self) -> str:
        return "shrink" if self.kind is FacetKind.SHRINK else f"merge({self.index})"


@dataclass
class DeltaComplex:
    """
    Δ_g の面束

    Attributes:
        genus: 種数
        cells: (次元, 正準形) 順に並べたセル
        facets: セル番号 → [(面のセル番号, 面の種類)] (多重集合、d_0, d_1, ... の順)
    """

    genus: int
    cells: List[FilteredClass]
    facets: List[List[Tuple[int, Facet]]]
    index: Dict[CanonicalForm, int] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {c.form: i for i, c in enumerate(self.cells)}

    def dim(self, i: int) -> int:
        return self.cells[i].dim

    @property
    def dimension(self) -> int:
        return max(c.dim for c in self.cells)

    def cells_of_dim(self, d: int) -> List[int]:
        return [i for i, c in enumerate(self.cells) if c.dim == d]

    def lookup(self, fg: FilteredGraph) -> int:
        return self.index[canonical(fg)]


def build_delta(g: int, workers: int = 1) -> DeltaComplex:
    """
    Δ_g を構築する

    Args:
        g: 種数 (1 以上)
        workers: フィルトレーション列挙の並列数
    """
    classes = stable_graphs(g)
    cells: List[FilteredClass] = [c for group in all_filtered_structures(classes, workers) for c in group]
    cells.sort(key=lambda c: (c.dim, c.form))
    complex_ = DeltaComplex(g, cells, [[] for _ in cells])

    for i, cell in enumerate(cells):
        fg = cell.representative
        complex_.facets[i] = [
            (complex_.lookup(Facet.d(k).apply(fg)), Facet.d(k)) for k in range(fg.depth if fg.depth > 1 else 0)
        ]

    logger.info(f"Δ_{g} を構築しました: f-ベクトル {f_vector(complex_)}")
    return complex_


def f_vector(d: DeltaComplex) -> List[int]:
    counts = Counter(c.dim for c in d.cells)
    return [counts.get(k, 0) for k in range(d.dimension + 1)]


def dimension_and_purity(d: DeltaComplex) -> Tuple[int, bool]:
    """
    最大次元と、極大セルが全てその次元かどうか

    Returns:
        Tuple[int, bool]: (次元, 純粋か)
    """
    covered = {face for faces in d.facets for face, _ in faces}
    maximal = [i for i in range(len(d.cells)) if i not in covered]
    top = d.dimension
    return top, all(d.dim(i) == top for i in maximal)


def report_dimension(d: DeltaComplex) -> Dict[str, int]:
    """計算した次元を 2g-3 と比較し、食い違いをログに残す"""
    computed, _ = dimension_and_purity(d)
    formula = 0 if d.genus == 1 else 2 * d.genus - 3
    result = {"computed": computed, "formula": formula}
    if d.genus == 3:
        result["stated"] = 4
        if computed != 4:
            logger.warning(f"Δ_3 の次元: 計算値 {computed}, 2g-3 = {formula}, 別の記述では 4 (食い違いを記録)")
    if computed != formula:
        logger.warning(f"Δ_{d.genus} の次元 {computed} が 2g-3 = {formula} と一致しません")
    return result


def one_skeleton(d: DeltaComplex) -> nx.MultiGraph:
    """0-セルを頂点、1-セルを辺とする networkx グラフ"""
    graph = nx.MultiGraph()
    for i in d.cells_of_dim(0):
        graph.add_node(i, label=d.cells[i].form.hex)
    for i in d.cells_of_dim(1):
        (a, _), (b, _) = d.facets[i]
        graph.add_edge(a, b, key=i)
    return graph


def is_connected(d: DeltaComplex) -> bool:
    skeleton = one_skeleton(d)
    return skeleton.number_of_nodes() > 0 and nx.is_connected(skeleton)


def euler_characteristic(d: DeltaComplex) -> int:
    return sum((-1) ** c.dim for c in d.cells)


def vertices_of(d: DeltaComplex, i: int) -> List[int]:
    """
    単体の頂点 G_1, ..., G_m (G_j = G/(E_1 ∪ ... ∪ E_{j-1})) のセル番号
    """
    fg = d.cells[i].representative
    result = [d.lookup(FilteredGraph.trivial(fg.graph))]
    current = fg
    while current.depth > 1:
        current = current.shrink()
        result.append(d.lookup(FilteredGraph.trivial(current.graph)))
    return result


def simplices_containing(d: DeltaComplex, vertex: int, dim: Optional[int] = None) -> List[int]:
    """
    頂点 vertex (0-セル番号) を頂点に持つ dim 次元の単体 (省略時は最大次元)
    """
    dim = d.dimension if dim is None else dim
    return [i for i in d.cells_of_dim(dim) if vertex in vertices_of(d, i)]


def vertices_in_unique_top_simplex(d: DeltaComplex) -> Dict[int, int]:
    """
    最大次元の単体にちょうど 1 つだけ含まれる 0-セル

    Returns:
        Dict[int, int]: 0-セル番号 → その単体のセル番号
    """
    owners: Dict[int, List[int]] = {}
    for i in d.cells_of_dim(d.dimension):
        for v in set(vertices_of(d, i)):
            owners.setdefault(v, []).append(i)
    return {v: cells[0] for v, cells in sorted(owners.items()) if len(cells) == 1}


def check_facet_identities(d: DeltaComplex) -> List[Tuple[int, int, int]]:
    """
    d_i d_j = d_{j-1} d_i (i < j) を 2 次元以上の全てのセルで確かめる

    Returns:
        List[Tuple[int, int, int]]: 成り立たない (セル, i, j) の一覧 (空なら成立)
    """
    failures = []
    for n, cell in enumerate(d.cells):
        fg = cell.representative
        # 1-単体の面は 0-単体で、それ以上面を取れない
        if fg.depth < 3:
            continue
        for j in range(1, fg.depth):
            for i in range(j):
                left = Facet.d(i).apply(Facet.d(j).apply(fg))
                right = Facet.d(j - 1).apply(Facet.d(i).apply(fg))
                if canonical(left) != canonical(right):
                    failures.append((n, i, j))
    if failures:
        logger.error(f"面の恒等式が {len(failures)} 箇所で成り立ちません")
    return failures


def check_forest_condition(d: DeltaComplex) -> List[int]:
    """森の条件を満たさない代表元のセル番号"""
    return [i for i, c in enumerate(d.cells) if not c.representative.is_filtered_by_forests()]


def to_dot(d: DeltaComplex) -> str:
    """1-骨格の DOT 表現"""
    skeleton = one_skeleton(d)
    skeleton.graph["name"] = f"Delta_{d.genus}"
    return nx.nx_pydot.to_pydot(skeleton).to_string()


# ----------------------------------------------------------------------
# 面束と崩壊
# ----------------------------------------------------------------------
@dataclass
class FacePoset:
    """
    セルの次元と被覆関係 (重複度付き) だけを持つ汎用の面束

    Attributes:
        dims: セルごとの次元
        faces: セル → {面: 重複度} (退化した貼り付けを含む)
        labels: 表示用のラベル
    """

    dims: List[int]
    faces: List[Dict[int, int]]
    labels: Optional[List[str]] = None
    cofaces: List[Dict[int, int]] = field(init=False)

    def __post_init__(self):
        self.cofaces = [dict() for _ in self.dims]
        for cell, faces in enumerate(self.faces):
            for face, multiplicity in faces.items():
                self.cofaces[face][cell] = self.cofaces[face].get(cell, 0) + multiplicity

    def __len__(self) -> int:
        return len(self.dims)


def face_poset(d: DeltaComplex) -> FacePoset:
    faces = [dict(Counter(face for face, _ in slots)) for slots in d.facets]
    return FacePoset([c.dim for c in d.cells], faces, [c.form.hex for c in d.cells])


@dataclass
class CollapseCertificate:
    """
    崩壊の証明書

    Attributes:
        verdict: "collapsible" または "unknown"
        steps: (自由面, 余面) の除去順
        seed: 見つけたときの乱数シード
        remaining: 最後に残ったセル
    """

    verdict: str
    steps: List[Tuple[int, int]] = field(default_factory=list)
    seed: Optional[int] = None
    remaining: List[int] = field(default_factory=list)

    @property
    def collapsible(self) -> bool:
        return self.verdict == "collapsible"


class _CollapseState:
    def __init__(self, poset: FacePoset):
        self.poset = poset
        self.alive = [True] * len(poset)
        self.covers = [dict(c) for c in poset.cofaces]

    def free_partner(self, face: int) -> Optional[int]:
        """face が自由面ならその唯一の余面"""
        if not self.alive[face] or len(self.covers[face]) != 1:
            return None
        ((coface, multiplicity),) = self.covers[face].items()
        if multiplicity != 1 or self.poset.dims[coface] != self.poset.dims[face] + 1:
            return None
        if self.covers[coface]:
            return None
        return coface

    def remove(self, cell: int) -> List[int]:
        """cell を除き、被覆が変化したセルを返す"""
        self.alive[cell] = False
        touched = []
        for face in self.poset.faces[cell]:
            if self.alive[face]:
                self.covers[face].pop(cell, None)
                touched.append(face)
        return touched


def _attempt(poset: FacePoset, rng: random.Random, budget: int) -> Tuple[List[Tuple[int, int]], List[int], int]:
    state = _CollapseState(poset)
    top = max(poset.dims, default=0)
    buckets: List[set] = [set() for _ in range(top + 2)]
    for cell in range(len(poset)):
        if state.free_partner(cell) is not None:
            buckets[poset.dims[cell] + 1].add(cell)

    steps: List[Tuple[int, int]] = []
    used = 0
    while used < budget:
        level = next((k for k in range(len(buckets) - 1, -1, -1) if buckets[k]), None)
        if level is None:
            break
        face = rng.choice(sorted(buckets[level]))
        buckets[level].discard(face)
        coface = state.free_partner(face)
        used += 1
        if coface is None:
            continue
        steps.append((face, coface))
        touched = set(state.remove(coface)) | set(state.remove(face))
        # 極大になったセルの面も自由面になりうる
        touched |= {f for cell in list(touched) for f in poset.faces[cell]}
        for cell in touched:
            if not state.alive[cell]:
                continue
            dim = poset.dims[cell] + 1
            if state.free_partner(cell) is not None:
                buckets[dim].add(cell)
            else:
                buckets[dim].discard(cell)
        for cell in (face, coface):
            buckets[poset.dims[cell] + 1].discard(cell)

    remaining = [c for c in range(len(poset)) if state.alive[c]]
    return steps, remaining, used


def _is_point(poset: FacePoset, remaining: Sequence[int]) -> bool:
    return len(remaining) == 1 and poset.dims[remaining[0]] == 0


def collapse_search(poset, seed: int = 0, budget: int = 200000, restarts: int = 32) -> CollapseCertificate:
    """
    自由面の除去を貪欲に繰り返して 1 点への崩壊を探す

    高次元の余面を優先し、同順位は乱数で選びます。見つからなければ
    シードを変えてやり直し、手数の合計が budget を超えたら "unknown" を返します。
    返す証明書は必ず replay_certificate で検証済みです。

    Args:
        poset: FacePoset または DeltaComplex
        seed: 最初の乱数シード
        budget: 全試行を通じた手数の上限
        restarts: 試行回数の上限
    """
    if isinstance(poset, DeltaComplex):
        poset = face_poset(poset)

    spent = 0
    best_remaining: List[int] = list(range(len(poset)))
    for attempt in range(max(restarts, 1)):
        if spent >= budget:
            break
        current_seed = seed + attempt
        steps, remaining, used = _attempt(poset, random.Random(current_seed), budget - spent)
        spent += used
        if _is_point(poset, remaining):
            certificate = CollapseCertificate("collapsible", steps, current_seed, remaining)
            if replay_certificate(poset, certificate):
                logger.info(f"崩壊列を発見しました: {len(steps)} 手 (シード {current_seed})")
                return certificate
            logger.error("崩壊列の再検証に失敗しました")
        if len(remaining) < len(best_remaining):
            best_remaining = remaining
        logger.debug(f"試行 {attempt}: {len(remaining)} セルが残りました")

    logger.info(f"崩壊列は見つかりませんでした (手数 {spent}, 残り最小 {len(best_remaining)} セル)")
    return CollapseCertificate("unknown", [], None, best_remaining)


def replay_certificate(poset, certificate: CollapseCertificate) -> bool:
    """証明書の各手で自由面の条件が成り立ち、最後に 1 点が残るかを再生して確かめる"""
    if isinstance(poset, DeltaComplex):
        poset = face_poset(poset)
    if not certificate.collapsible:
        return False
    state = _CollapseState(poset)
    for face, coface in certificate.steps:
        if state.free_partner(face) != coface:
            return False
        state.remove(coface)
        state.remove(face)
    remaining = [c for c in range(len(poset)) if state.alive[c]]
    return _is_point(poset, remaining)
