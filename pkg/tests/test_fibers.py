import itertools
import sys
from collections import Counter
from pathlib import Path

import pytest
import sympy

# プロジェクトのルートディレクトリをPYTHONPATHに追加
root_dir = Path(__file__).parent.parent
sys.path.append(str(root_dir))

from src.modules.acceptance_report import genus_two_fibers
from src.modules.tropical.delta_complex import Facet, build_delta
from src.modules.tropical.enumeration import FilteredClass, single_loop
from src.modules.tropical.fibers import (
    X,
    Cell,
    CellPoly,
    Fiber,
    cell_images,
    cube_orbits,
    fiber_poly,
    fixed_subcomplex,
    structure_map,
    subdivide,
)
from src.modules.tropical.isomorphism import Automorphism
from src.modules.tropical.multigraph import FilteredGraph, MultiGraph
from src.utils.error_handler import BurnsideIntegralityError, ConsistencyError


@pytest.fixture(scope="module")
def fibers():
    return genus_two_fibers()


@pytest.fixture(scope="module")
def fibers_by_genus():
    return {g: [Fiber(c.representative) for c in build_delta(g).cells] for g in (1, 2, 3)}


def direct_counts(fiber: Fiber, n: int) -> CellPoly:
    counts = Counter(orbit.dim for orbit in fiber.orbits(n))
    return CellPoly(tuple(counts[d] for d in range(n + 1)))


def closed_form(name: str, n: int) -> CellPoly:
    """種数 2 の 3 つのファイバーの母関数の閉じた式"""
    zero = 0 ** n
    if name == "A":
        expr = ((3 + 4 * X) ** n + 2 * (3 + 2 * X) ** n + 3 ** n + 4) / 8
    elif name == "B":
        expr = ((5 + 6 * X) ** n + 3 * (3 + 2 * X) ** n + 2 * 2 ** n + 3 ** n + 3 + 2 * zero) / 12
    else:
        expr = ((5 + 6 * X) ** n + (3 + 2 * X) ** n + 3 ** n + 1) / 4
    return CellPoly.from_sympy(sympy.expand(expr))


class TestCellPoly:
    """セル数の母関数のテスト"""

    def test_trailing_zeros_are_trimmed(self):
        assert CellPoly((1, 2, 0, 0)).coefficients == (1, 2)
        assert CellPoly(()).coefficients == (0,)

    def test_arithmetic(self):
        p = CellPoly((1, 1))
        assert (p ** 2).as_list() == [1, 2, 1]
        assert (p * CellPoly((2,))).as_list() == [2, 2]
        assert (p + CellPoly((0, 0, 3))).as_list() == [1, 1, 3]
        assert (p - p).as_list() == [0]
        assert p.shift(2).as_list() == [0, 0, 1, 1]
        assert p.scale(-3).as_list() == [-3, -3]

    def test_euler_and_degree(self):
        p = CellPoly((4, 5, 2))
        assert p.euler == 1
        assert p.degree == 2
        assert p[1] == 5 and p[7] == 0
        assert p.evaluate(1) == 11

    def test_sympy_round_trip(self):
        p = CellPoly((3, 0, 2))
        assert CellPoly.from_sympy(p.to_sympy()) == p


class TestSubdivision:
    """細分グラフ S(G,π) のテスト"""

    def test_loop(self):
        s = subdivide(FilteredGraph.trivial(single_loop()))
        assert s.flipped_edges == frozenset({0})
        assert s.cells == [Cell("h", 0), Cell("h", 1), Cell("m", 0), Cell("v", 0)]
        assert s.poly().as_list() == [2, 2]

    def test_genus_two(self, fibers):
        assert fibers["A"].subdivision.poly().as_list() == [3, 4]
        assert fibers["B"].subdivision.poly().as_list() == [5, 6]
        assert fibers["C"].subdivision.poly().as_list() == [5, 6]

    def test_unflipped_edge_is_not_subdivided(self):
        # 三重辺と一方の頂点のループ: 頂点は入れ替わらない
        graph = MultiGraph.from_edge_list([(0, 1), (0, 1), (0, 1), (1, 1)])
        s = subdivide(FilteredGraph.trivial(graph))
        assert s.flipped_edges == frozenset({3})
        assert Cell("e", 0) in s.index

    def test_endpoints(self, fibers):
        s = fibers["B"].subdivision
        for i, cell in enumerate(s.cells):
            assert len(s.endpoints[i]) == (2 if cell.dim else 0)
            assert all(s.dims[end] == 0 for end in s.endpoints[i])

    def test_fixed_subcomplex_of_identity(self, fibers):
        s = fibers["C"].subdivision
        identity = Automorphism.identity(fibers["C"].fg.graph)
        assert fixed_subcomplex(s, identity) == s.poly()

    def test_fixed_subcomplex_euler_is_at_most_base(self, fibers):
        for fiber in fibers.values():
            for (zero, one), _ in fiber.fixed_polys().items():
                assert zero - one <= 3


class TestFiberPoly:
    """Burnside の補題による母関数と軌道の直接列挙の一致"""

    @pytest.mark.parametrize("name", ["A", "B", "C"])
    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_closed_forms(self, fibers, name, n):
        assert fibers[name].poly(n) == closed_form(name, n)

    @pytest.mark.parametrize("name", ["A", "B", "C"])
    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_burnside_matches_orbits(self, fibers, name, n):
        assert fibers[name].poly(n) == direct_counts(fibers[name], n)

    def test_known_values(self, fibers):
        assert fibers["A"].poly(1).as_list() == [2, 1]
        assert fibers["B"].poly(1).as_list() == [2, 1]
        assert fibers["C"].poly(1).as_list() == [3, 2]
        assert fibers["A"].poly(2).as_list() == [5, 6, 3]
        assert fibers["B"].poly(2).as_list() == [6, 8, 4]
        assert fibers["C"].poly(2).as_list() == [11, 18, 10]

    @pytest.mark.parametrize("n", range(0, 8))
    def test_genus_one(self, n):
        fg = FilteredGraph.trivial(single_loop())
        expected = CellPoly.from_sympy(sympy.expand(((2 + 2 * X) ** n + 2 ** n) / 2))
        assert fiber_poly(fg, n) == expected

    def test_cube_orbits_are_canonical(self, fibers):
        fiber = fibers["C"]
        orbits = cube_orbits(fiber.fg, 2)
        assert len(orbits) == 39
        for orbit in orbits:
            assert fiber.canonical_locus(orbit.locus) == orbit.locus
            assert fiber.orbit_of(orbit.locus) == orbit

    def test_integrality_check(self, fibers):
        fiber = Fiber(fibers["B"].fg)
        fiber._fixed = Counter({(1, 1): 1})
        with pytest.raises(BurnsideIntegralityError):
            fiber.poly(1)

    def test_boundary_faces(self, fibers):
        fiber = fibers["A"]
        for orbit in fiber.orbits(2):
            faces = fiber.boundary_faces(orbit.locus)
            assert len(faces) == 2 * orbit.dim
            assert all(fiber.locus_dim(face) == orbit.dim - 1 for face in faces)


class TestStructureMap:
    """構造写像 C → A (縮約) と C → B (併合) のテスト"""

    def test_shrink_collapses_middle_edge(self, fibers):
        images = structure_map(fibers["C"], Facet.d(0), fibers["A"], 1)
        assert len(images) == 5
        assert sum(1 for image in images if image.degenerate) == 1
        for image in images:
            assert len(image.targets) == 1
            assert image.targets[0].dim == image.source.dim - (1 if image.degenerate else 0)

    def test_merge_preserves_dimension(self, fibers):
        images = structure_map(fibers["C"], Facet.d(1), fibers["B"], 2)
        assert not any(image.degenerate for image in images)
        for image in images:
            assert all(target.dim == image.source.dim for target in image.targets)

    def test_wrong_target_raises(self, fibers):
        with pytest.raises(ConsistencyError):
            cell_images(fibers["C"], Facet.d(0), fibers["B"])

    def test_finer_target_subdivision_covers_both_halves(self):
        # 頂点が入れ替わらない 2 頂点グラフを縮約すると、残る辺はループ (細分される) になる
        graph = MultiGraph.from_edge_list([(0, 1), (0, 1), (0, 1), (1, 1)])
        source = Fiber(FilteredClass.of(FilteredGraph(graph, (frozenset({0}), frozenset({1, 2, 3})))).representative)
        target = Fiber(FilteredClass.of(source.fg.shrink()).representative)
        images = cell_images(source, Facet.d(0), target)
        split = [options for options, _ in images if len(options) == 2]
        assert len(split) == 2


class TestAllCells:
    """種数 3 以下の全てのセルのファイバー"""

    @pytest.mark.parametrize("g", [1, 2, 3])
    @pytest.mark.parametrize("n", [0, 1, 2, 3])
    def test_product_cells_multiply(self, fibers_by_genus, g, n):
        for fiber in fibers_by_genus[g]:
            s = fiber.subdivision
            counts = Counter(sum(s.dims[c] for c in locus)
                             for locus in itertools.product(range(len(s)), repeat=n))
            assert CellPoly(tuple(counts[d] for d in range(n + 1))) == s.poly() ** n

    @pytest.mark.parametrize("g", [1, 2])
    def test_burnside_matches_orbits_three_points(self, fibers_by_genus, g):
        for fiber in fibers_by_genus[g]:
            assert fiber.poly(3) == direct_counts(fiber, 3)

    @pytest.mark.slow
    def test_burnside_matches_orbits_three_points_genus_three(self, fibers_by_genus):
        for fiber in fibers_by_genus[3]:
            assert fiber.poly(3) == direct_counts(fiber, 3)

    @pytest.mark.parametrize("g, n", [(g, n) for g in (1, 2, 3) for n in (0, 1, 2)] + [(2, 3)])
    def test_stabilizer_fixes_cubes_pointwise(self, fibers_by_genus, g, n):
        for fiber in fibers_by_genus[g]:
            for orbit in fiber.orbits(n):
                assert fiber.stabilizer_fixes_pointwise(orbit), fiber.name(orbit)

    def test_swapped_endpoints_are_detected(self):
        # 中点を両半辺を端に持つセルに見立てると、反転する元が端を入れ替える
        fiber = Fiber(FilteredGraph.trivial(single_loop()))
        s = fiber.subdivision
        midpoint = s.index[Cell("m", 0)]
        s.endpoints[midpoint] = (s.index[Cell("h", 0)], s.index[Cell("h", 1)])
        assert not fiber.stabilizer_fixes_pointwise(fiber.orbit_of((midpoint,)))
