import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest
from sympy import GF
from sympy.polys.matrices import DomainMatrix

# プロジェクトのルートディレクトリをPYTHONPATHに追加
root_dir = Path(__file__).parent.parent
sys.path.append(str(root_dir))

from src.modules.acceptance_report import chi_genus_two, genus_two_fibers, genus_two_signed_poly
from src.modules.tropical.cw_complex import (
    CWCell,
    ChainComplexZ2,
    asymptotic_coefficient,
    build_cw,
    euler_sweep,
    euler_x,
    fiber_complex,
    fibers_of,
    genus_one_euler,
    gf2_rank,
    homology_z2,
    reduced_is_trivial,
    signed_poly,
    total_poly,
)
from src.modules.tropical.delta_complex import build_delta, collapse_search, replay_certificate
from src.modules.tropical.fibers import CellPoly, CubeOrbit
from src.utils.error_handler import BoundaryConsistencyError


@pytest.fixture(scope="module")
def genus_two():
    delta = build_delta(2)
    return delta, fibers_of(delta)


@pytest.fixture(scope="module")
def genus_three():
    delta = build_delta(3)
    return delta, fibers_of(delta)


def sympy_rank(vectors, width):
    field = GF(2)
    rows = [[field((v >> k) & 1) for k in range(width)] for v in vectors]
    return DomainMatrix(rows, (len(rows), width), field).rank()


class TestGF2Rank:
    """Z_2 上の階数のテスト"""

    def test_small_cases(self):
        assert gf2_rank([]) == 0
        assert gf2_rank([0, 0]) == 0
        assert gf2_rank([0b11, 0b01, 0b10]) == 2
        assert gf2_rank([0b100, 0b010, 0b001]) == 3

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_sympy(self, seed):
        rng = random.Random(seed)
        width = 12
        vectors = [rng.getrandbits(width) for _ in range(rng.randint(1, 15))]
        assert gf2_rank(vectors) == sympy_rank(vectors, width)


class TestChainComplex:
    """鎖複体の組み立てと ∂∘∂ = 0 の検査"""

    def test_boundary_squared_violation(self):
        cells = [
            CWCell(0, CubeOrbit((0,), 0), 0),
            CWCell(0, CubeOrbit((1,), 1), 0),
            CWCell(0, CubeOrbit((1, 1), 2), 0),
        ]
        complex_ = ChainComplexZ2(cells, [0, 0, 0], [0, 0b1, 0b1], [{}, {}, {}], {0: [0], 1: [1], 2: [2]})
        with pytest.raises(BoundaryConsistencyError) as excinfo:
            complex_.check_boundary_squared()
        assert excinfo.value.cell == cells[2]
        assert excinfo.value.face == cells[0]

    @pytest.mark.parametrize("name, counts, betti", [
        ("A", [5, 6, 3], [1, 0, 1]),
        ("B", [6, 8, 4], [1, 0, 1]),
        ("C", [11, 18, 10], [1, 0, 2]),
    ])
    def test_genus_two_fiber_complexes(self, name, counts, betti):
        complex_ = fiber_complex(genus_two_fibers()[name].fg, 2)
        assert complex_.counts() == counts
        assert homology_z2(complex_) == betti

    def test_euler_matches_betti(self):
        complex_ = fiber_complex(genus_two_fibers()["C"].fg, 3)
        betti = homology_z2(complex_)
        assert complex_.euler() == sum((-1) ** d * b for d, b in enumerate(betti))

    def test_reduced_is_trivial(self):
        assert reduced_is_trivial([1, 0, 0])
        assert not reduced_is_trivial([1, 0, 1])
        assert not reduced_is_trivial([2])


class TestGenusTwo:
    """X_{2,n} の計算"""

    def test_total_poly(self, genus_two):
        delta, fibers = genus_two
        assert total_poly(2, 0, delta, fibers).as_list() == [2, 1]
        assert total_poly(2, 1, delta, fibers).as_list() == [4, 5, 2]

    def test_euler_characteristic(self, genus_two):
        delta, fibers = genus_two
        assert [euler_x(2, n, delta, fibers) for n in range(6)] == [1, 1, 1, 1, 0, -4]

    def test_closed_form(self, genus_two):
        delta, fibers = genus_two
        for n in range(11):
            assert Fraction(euler_x(2, n, delta, fibers)) == chi_genus_two(n)

    def test_signed_poly(self, genus_two):
        delta, fibers = genus_two
        for n in range(7):
            assert signed_poly(2, n, delta, fibers) == genus_two_signed_poly(n)
            assert signed_poly(2, n, delta, fibers).euler == euler_x(2, n, delta, fibers)

    @pytest.mark.parametrize("n", [0, 1, 2])
    def test_contractible_cases(self, genus_two, n):
        delta, fibers = genus_two
        complex_ = build_cw(2, n, delta, fibers)
        assert complex_.counts() == total_poly(2, n, delta, fibers).as_list()
        assert reduced_is_trivial(homology_z2(complex_))

    def test_x21_collapses(self, genus_two):
        delta, fibers = genus_two
        poset = build_cw(2, 1, delta, fibers).face_poset()
        certificate = collapse_search(poset, seed=0)
        assert certificate.collapsible
        assert replay_certificate(poset, certificate)

    @pytest.mark.slow
    def test_x24_has_homology(self, genus_two):
        delta, fibers = genus_two
        betti = homology_z2(build_cw(2, 4, delta, fibers))
        assert not reduced_is_trivial(betti)
        assert sum((-1) ** d * b for d, b in enumerate(betti)) == 0

    def test_euler_sweep(self, genus_two):
        delta, _ = genus_two
        table = euler_sweep(2, 5, delta)
        assert list(table.columns) == ["n", "cells", "euler"]
        assert table["euler"].tolist() == [1, 1, 1, 1, 0, -4]
        assert table["cells"].iloc[1] == "4 5 2"


class TestGenusOne:
    def test_euler(self):
        assert [genus_one_euler(n) for n in range(2, 11)] == [2 ** (n - 2) for n in range(2, 11)]

    def test_invalid_marks(self):
        with pytest.raises(ValueError):
            genus_one_euler(0)


class TestAsymptotics:
    """漸近係数のテスト"""

    def test_genus_one(self):
        result = asymptotic_coefficient(1)
        assert result.value == Fraction(1, 4)
        assert result.base == 2

    def test_genus_two(self, genus_two):
        delta, fibers = genus_two
        result = asymptotic_coefficient(2, delta=delta, fibers=fibers)
        assert result.value == Fraction(-1, 24)
        assert result.anomalies == []

    def test_genus_three(self, genus_three):
        delta, fibers = genus_three
        assert asymptotic_coefficient(3, delta=delta, fibers=fibers).value == Fraction(1, 48)

    def test_other_base(self, genus_two):
        delta, fibers = genus_two
        # 底 2 では 2^n の係数: A は 0、B は 2/12、C は 0
        assert asymptotic_coefficient(2, base=2, delta=delta, fibers=fibers).value == Fraction(1, 6)

    def test_cell_count_cross_check(self, genus_three):
        delta, fibers = genus_three
        complex_ = build_cw(3, 0, delta, fibers)
        assert CellPoly(tuple(complex_.counts())) == total_poly(3, 0, delta, fibers)
