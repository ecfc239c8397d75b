#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
X_{g,n} の CW 構造と Z_2 係数の鎖複体

セルは (σ, τ) (σ は Δ_g の単体、τ は C(σ) のキューブ軌道) で、次元は dim σ + dim τ です。
境界は次の和を 2 を法として取ったものです。

- ファイバー内: 代表キューブの 2·dim τ 個の面をそれぞれ軌道代表にしたもの
- 単体の面 λ ごと: 構造写像で τ の像が覆うキューブ (次元が落ちる像は係数 0)

境界行列の列は Python の int のビット列で持ち、掃き出しで階数を求めます。
"""

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from src.modules.tropical.delta_complex import DeltaComplex, FacePoset, build_delta
from src.modules.tropical.enumeration import single_loop
from src.modules.tropical.fibers import CellPoly, CubeOrbit, Fiber, cell_images, structure_map
from src.modules.tropical.multigraph import FilteredGraph
from src.utils.error_handler import BoundaryConsistencyError, CellCountMismatchError
from src.utils.logging_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class CWCell:
    simplex: int
    cube: CubeOrbit
    simplex_dim: int

    @property
    def dim(self) -> int:
        return self.simplex_dim + self.cube.dim


@dataclass
class ChainComplexZ2:
    """
    Z_2 係数の鎖複体

    Attributes:
        cells: セル (次元順)
        positions: セル番号 → 同じ次元のセルの中での位置
        boundary: セル番号 → 境界のビット列 (1 次元低いセルの位置)
        closure: セル番号 → {面のセル番号: 重複度} (係数 0 の貼り付けも含む)
    """

    cells: List[CWCell]
    positions: List[int] = field(default_factory=list)
    boundary: List[int] = field(default_factory=list)
    closure: List[Dict[int, int]] = field(default_factory=list)
    by_dim: Dict[int, List[int]] = field(default_factory=dict)

    @property
    def top_dim(self) -> int:
        return max((c.dim for c in self.cells), default=0)

    def counts(self) -> List[int]:
        return [len(self.by_dim.get(d, [])) for d in range(self.top_dim + 1)]

    def euler(self) -> int:
        return sum((-1) ** d * k for d, k in enumerate(self.counts()))

    def columns(self, d: int) -> List[int]:
        return [self.boundary[i] for i in self.by_dim.get(d, [])]

    def check_boundary_squared(self) -> None:
        """
        ∂∘∂ = 0 を確かめる

        Raises:
            BoundaryConsistencyError: 成り立たないセルがある場合 (セルと余次元 2 の面を保持)
        """
        for d in range(2, self.top_dim + 1):
            lower = self.by_dim.get(d - 1, [])
            for i in self.by_dim.get(d, []):
                total = 0
                for pos in _bits(self.boundary[i]):
                    total ^= self.boundary[lower[pos]]
                if total:
                    bad = self.by_dim[d - 2][next(iter(_bits(total)))]
                    raise BoundaryConsistencyError(
                        f"∂∘∂ ≠ 0: セル {i} (次元 {d})", cell=self.cells[i], face=self.cells[bad]
                    )

    def face_poset(self) -> FacePoset:
        """崩壊探索用の面束 (係数 0 の貼り付けも被覆として含む)"""
        return FacePoset([c.dim for c in self.cells], [dict(c) for c in self.closure])


def _bits(value: int):
    while value:
        low = value & -value
        yield low.bit_length() - 1
        value ^= low


def gf2_rank(vectors: Sequence[int]) -> int:
    """ビット列として表したベクトルの Z_2 上の階数"""
    basis: Dict[int, int] = {}
    for v in vectors:
        while v:
            pivot = v.bit_length() - 1
            if pivot in basis:
                v ^= basis[pivot]
            else:
                basis[pivot] = v
                break
    return len(basis)


def _assemble(entries: List[Tuple[int, int, Fiber]], n: int,
              facets: Optional[List[List[Tuple[int, object]]]] = None) -> ChainComplexZ2:
    """
    (単体番号, 単体の次元, ファイバー) の列から鎖複体を組み立てる

    facets を省略するとファイバー内の境界だけを使います。
    """
    cells: List[CWCell] = []
    for simplex, simplex_dim, fiber in entries:
        cells += [CWCell(simplex, orbit, simplex_dim) for orbit in fiber.orbits(n)]
    cells.sort(key=lambda c: (c.dim, c.simplex, c.cube.locus))

    index = {(c.simplex, c.cube.locus): i for i, c in enumerate(cells)}
    by_dim: Dict[int, List[int]] = {}
    positions = []
    for i, c in enumerate(cells):
        members = by_dim.setdefault(c.dim, [])
        positions.append(len(members))
        members.append(i)

    fibers = {simplex: fiber for simplex, _, fiber in entries}
    images: Dict[Tuple[int, int], Dict[Tuple[int, ...], object]] = {}
    if facets is not None:
        for simplex, _, fiber in entries:
            for slot, (target, facet) in enumerate(facets[simplex]):
                mapped = structure_map(fiber, facet, fibers[target], n, cell_images(fiber, facet, fibers[target]))
                images[(simplex, slot)] = {image.source.locus: image for image in mapped}

    boundary = [0] * len(cells)
    closure: List[Dict[int, int]] = [dict() for _ in cells]
    for i, cell in enumerate(cells):
        incidence: Counter = Counter()
        reach: Counter = Counter()
        fiber = fibers[cell.simplex]
        for face in fiber.boundary_faces(cell.cube.locus):
            j = index[(cell.simplex, face)]
            incidence[j] += 1
            reach[j] += 1
        if facets is not None:
            for slot, (target, _) in enumerate(facets[cell.simplex]):
                image = images[(cell.simplex, slot)][cell.cube.locus]
                for orbit in image.targets:
                    j = index[(target, orbit.locus)]
                    reach[j] += 1
                    if not image.degenerate:
                        incidence[j] += 1
        boundary[i] = sum(1 << positions[j] for j, k in incidence.items() if k % 2)
        closure[i] = dict(reach)

    complex_ = ChainComplexZ2(cells, positions, boundary, closure, by_dim)
    complex_.check_boundary_squared()
    return complex_


def build_cw(g: int, n: int, delta: Optional[DeltaComplex] = None,
             fibers: Optional[List[Fiber]] = None) -> ChainComplexZ2:
    """
    X_{g,n} の CW 構造の鎖複体を構築する

    Raises:
        BoundaryConsistencyError: ∂∘∂ ≠ 0 の場合
        CellCountMismatchError: セル数が totalPoly と一致しない場合
    """
    delta = delta or build_delta(g)
    fibers = fibers or fibers_of(delta)
    entries = [(i, cell.dim, fibers[i]) for i, cell in enumerate(delta.cells)]
    complex_ = _assemble(entries, n, delta.facets)

    expected = total_poly(g, n, delta, fibers)
    counts = complex_.counts()
    if CellPoly(tuple(counts)) != expected:
        raise CellCountMismatchError(
            f"X_{g},{n} のセル数 {counts} が母関数 {expected.as_list()} と一致しません",
            {"種数": g, "印の数": n},
        )
    logger.info(f"X_{{{g},{n}}} の CW 構造: セル数 {counts}")
    return complex_


def fibers_of(delta: DeltaComplex) -> List[Fiber]:
    return [Fiber(cell.representative) for cell in delta.cells]


def fiber_complex(fg: FilteredGraph, n: int) -> ChainComplexZ2:
    """単体 1 つ分のファイバー C(σ) だけの鎖複体"""
    return _assemble([(0, 0, Fiber(fg))], n)


def homology_z2(c: ChainComplexZ2) -> List[int]:
    """Z_2 係数のベッチ数 β_0, β_1, ..."""
    top = c.top_dim
    ranks = [0] + [gf2_rank(c.columns(d)) for d in range(1, top + 2)]
    counts = c.counts()
    betti = [counts[d] - ranks[d] - ranks[d + 1] for d in range(top + 1)]
    logger.info(f"Z_2 ベッチ数: {betti}")
    return betti


def reduced_is_trivial(betti: Sequence[int]) -> bool:
    return list(betti[:1]) == [1] and all(b == 0 for b in betti[1:])


def total_poly(g: int, n: int, delta: Optional[DeltaComplex] = None,
               fibers: Optional[List[Fiber]] = None) -> CellPoly:
    """P(X_{g,n}) = Σ_σ x^{dim σ} P(C(σ))"""
    delta = delta or build_delta(g)
    fibers = fibers or fibers_of(delta)
    total = CellPoly((0,))
    for cell, fiber in zip(delta.cells, fibers):
        total = total + fiber.poly(n).shift(cell.dim)
    return total


def signed_poly(g: int, n: int, delta: Optional[DeltaComplex] = None,
                fibers: Optional[List[Fiber]] = None) -> CellPoly:
    """Σ_σ (-1)^{dim σ} P(C(σ)) (x = -1 でのみ P(X_{g,n}) と一致)"""
    delta = delta or build_delta(g)
    fibers = fibers or fibers_of(delta)
    total = CellPoly((0,))
    for cell, fiber in zip(delta.cells, fibers):
        total = total + fiber.poly(n).scale((-1) ** cell.dim)
    return total


def euler_x(g: int, n: int, delta: Optional[DeltaComplex] = None,
            fibers: Optional[List[Fiber]] = None) -> int:
    return total_poly(g, n, delta, fibers).euler


def genus_one_fiber() -> Fiber:
    return Fiber(FilteredGraph.trivial(single_loop()))


def genus_one_euler(n: int) -> int:
    """χ(TM_{1,n}) = χ(C(ループ)) (印 n-1 個)"""
    if n < 1:
        raise ValueError("印の数は 1 以上である必要があります")
    return genus_one_fiber().poly(n - 1).euler


@dataclass
class AsymptoticResult:
    """
    χ(TM_{g,n}) の base^n の係数

    Attributes:
        value: 係数 (既約分数)
        base: 底
        anomalies: χ(Fix γ) > base となった (単体番号, χ) の一覧
    """

    genus: int
    value: Fraction
    base: int
    anomalies: List[Tuple[int, int]] = field(default_factory=list)


def asymptotic_coefficient(g: int, base: Optional[int] = None, delta: Optional[DeltaComplex] = None,
                           fibers: Optional[List[Fiber]] = None) -> AsymptoticResult:
    """
    Σ_σ (-1)^{dim σ} (1/|Aut σ|) #{γ : χ(Fix γ) = base}

    種数 1 では TM_{1,n} が印 n-1 個の X_{1,n-1} なので、さらに base で割ります。
    """
    base = g + 1 if base is None else base
    delta = delta or build_delta(g)
    fibers = fibers or fibers_of(delta)

    value = Fraction(0)
    anomalies: List[Tuple[int, int]] = []
    for i, (cell, fiber) in enumerate(zip(delta.cells, fibers)):
        hits = 0
        for (zero, one), count in fiber.fixed_polys().items():
            chi = zero - one
            if chi == base:
                hits += count
            elif chi > base:
                anomalies.append((i, chi))
        value += Fraction((-1) ** cell.dim * hits, fiber.order)
    if g == 1:
        value /= base
    if anomalies:
        logger.warning(f"χ(Fix) が底 {base} を超える元があります: {anomalies}")
    logger.info(f"種数 {g} の漸近係数: {value} (底 {base})")
    return AsymptoticResult(g, value, base, anomalies)


def euler_sweep(g: int, n_max: int, delta: Optional[DeltaComplex] = None) -> pd.DataFrame:
    """n = 0..n_max のセル数とオイラー標数の表"""
    delta = delta or build_delta(g)
    fibers = fibers_of(delta)
    rows = []
    for n in range(n_max + 1):
        poly = total_poly(g, n, delta, fibers)
        rows.append({"n": n, "cells": " ".join(str(c) for c in poly.as_list()), "euler": poly.euler})
    return pd.DataFrame(rows, columns=["n", "cells", "euler"])
