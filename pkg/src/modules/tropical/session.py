#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
計算結果のメモ化とディスクキャッシュをまとめたセッション

stable_graphs(g)、Δ_g、ファイバーの母関数 (正準形 × n) をキャッシュします。
"""

from typing import Dict, List, Optional, Tuple

from src.modules.tropical.cw_complex import fibers_of
from src.modules.tropical.delta_complex import DeltaComplex, Facet, FacetKind, build_delta
from src.modules.tropical.enumeration import FilteredClass, StableClass, stable_graphs
from src.modules.tropical.fibers import CellPoly, Fiber
from src.modules.tropical.isomorphism import CanonicalForm
from src.modules.tropical.multigraph import FilteredGraph, MultiGraph
from src.utils.cache import ResultCache
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


def encode_filtered(cls: FilteredClass) -> Dict:
    return {
        "form": cls.form.hex,
        "graph": cls.graph.to_text(),
        "blocks": cls.representative.blocks_as_lists(),
    }


def decode_filtered(payload: Dict) -> FilteredClass:
    graph = MultiGraph.from_text(payload["graph"])
    fg = FilteredGraph(graph, tuple(frozenset(b) for b in payload["blocks"]))
    return FilteredClass(fg, CanonicalForm.from_hex(payload["form"]), fg.depth)


def encode_delta(d: DeltaComplex) -> Dict:
    return {
        "genus": d.genus,
        "cells": [encode_filtered(c) for c in d.cells],
        "facets": [[[target, facet.kind.value, facet.index] for target, facet in slots] for slots in d.facets],
    }


def decode_delta(payload: Dict) -> DeltaComplex:
    cells = [decode_filtered(c) for c in payload["cells"]]
    facets = [[(target, Facet(FacetKind(kind), index)) for target, kind, index in slots]
              for slots in payload["facets"]]
    return DeltaComplex(payload["genus"], cells, facets)


class TropicalSession:
    """
    1 回の実行の中で計算結果を共有するクラス

    Args:
        cache: ディスクキャッシュ (None なら無効)
        workers: Δ_g 構築の並列数
    """

    def __init__(self, cache: Optional[ResultCache] = None, workers: int = 1):
        self.cache = cache or ResultCache(None, enabled=False)
        self.workers = workers
        self._stable: Dict[int, List[StableClass]] = {}
        self._delta: Dict[int, DeltaComplex] = {}
        self._fibers: Dict[int, List[Fiber]] = {}
        self._polys: Dict[Tuple[str, int], CellPoly] = {}

    def stable_graphs(self, g: int) -> List[StableClass]:
        if g not in self._stable:
            def encode(classes):
                return [{"form": c.form.hex, "graph": c.representative.to_text()} for c in classes]

            def decode(payload):
                return [StableClass(MultiGraph.from_text(p["graph"]), CanonicalForm.from_hex(p["form"]), g)
                        for p in payload]

            self._stable[g] = self.cache.get_or_compute(
                "stable", f"g{g}", lambda: stable_graphs(g), encode, decode
            )
        return self._stable[g]

    def delta(self, g: int) -> DeltaComplex:
        if g not in self._delta:
            self._delta[g] = self.cache.get_or_compute(
                "delta", f"g{g}", lambda: build_delta(g, self.workers), encode_delta, decode_delta
            )
        return self._delta[g]

    def fibers(self, g: int) -> List[Fiber]:
        if g not in self._fibers:
            self._fibers[g] = fibers_of(self.delta(g))
        return self._fibers[g]

    def fiber_poly(self, cls: FilteredClass, fiber: Fiber, n: int) -> CellPoly:
        key = (cls.form.hex, n)
        if key not in self._polys:
            self._polys[key] = self.cache.get_or_compute(
                "fiberpoly", f"n{n}", lambda: fiber.poly(n),
                lambda p: p.as_list(), lambda payload: CellPoly(tuple(payload)), hexkey=cls.form.hex,
            )
        return self._polys[key]

    def find_class(self, g: int, key: str) -> Tuple[int, FilteredClass]:
        """
        正準形の16進表現 (一意な接頭辞でも可) または番号から Δ_g のセルを探す

        16進の接頭辞として先に照合し、どのセルにも一致しない数字だけを番号として扱います。

        Raises:
            ValueError: 見つからない、または一意に決まらない場合
        """
        d = self.delta(g)
        matches = [i for i, c in enumerate(d.cells) if c.form.hex.startswith(key.lower())]
        if not matches and key.isdigit() and int(key) < len(d.cells):
            index = int(key)
            return index, d.cells[index]
        if len(matches) != 1:
            raise ValueError(f"正準形 {key} に一致するセルが {len(matches)} 個あります")
        return matches[0], d.cells[matches[0]]
