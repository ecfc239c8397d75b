import sys
from pathlib import Path

import pytest

# プロジェクトのルートディレクトリをPYTHONPATHに追加
root_dir = Path(__file__).parent.parent
sys.path.append(str(root_dir))

from src.modules.tropical.delta_complex import (
    CollapseCertificate,
    FacePoset,
    Facet,
    FacetKind,
    build_delta,
    check_facet_identities,
    check_forest_condition,
    collapse_search,
    dimension_and_purity,
    euler_characteristic,
    f_vector,
    face_poset,
    is_connected,
    one_skeleton,
    replay_certificate,
    report_dimension,
    simplices_containing,
    to_dot,
    vertices_in_unique_top_simplex,
    vertices_of,
)
from src.modules.tropical.enumeration import bouquet, double_edge_with_loops, doubled_square, theta_graph
from src.modules.tropical.isomorphism import canonical, is_isomorphic
from src.modules.tropical.multigraph import FilteredGraph


@pytest.fixture(scope="module")
def delta_two():
    return build_delta(2)


@pytest.fixture(scope="module")
def delta_three():
    return build_delta(3)


def filled_triangle() -> FacePoset:
    return FacePoset(
        [0, 0, 0, 1, 1, 1, 2],
        [{}, {}, {}, {0: 1, 1: 1}, {1: 1, 2: 1}, {0: 1, 2: 1}, {3: 1, 4: 1, 5: 1}],
    )


class TestFacet:
    def test_indexing(self):
        assert Facet.d(0) == Facet(FacetKind.SHRINK, 0)
        assert Facet.d(2) == Facet(FacetKind.MERGE, 2)
        assert str(Facet.d(0)) == "shrink"
        assert str(Facet.d(1)) == "merge(1)"


class TestDeltaTwo:
    """Δ_2 は 1-単体"""

    def test_single_edge(self, delta_two):
        assert f_vector(delta_two) == [2, 1]
        assert dimension_and_purity(delta_two) == (1, True)
        assert is_connected(delta_two)
        assert euler_characteristic(delta_two) == 1

    def test_facets(self, delta_two):
        (edge,) = delta_two.cells_of_dim(1)
        targets = {facet.kind: delta_two.cells[target].form for target, facet in delta_two.facets[edge]}
        assert targets[FacetKind.SHRINK] == canonical(bouquet(2))
        assert targets[FacetKind.MERGE] == canonical(theta_graph())

    def test_vertices_of(self, delta_two):
        (edge,) = delta_two.cells_of_dim(1)
        forms = [delta_two.cells[i].form for i in vertices_of(delta_two, edge)]
        assert forms == [canonical(theta_graph()), canonical(bouquet(2))]

    def test_one_skeleton_and_dot(self, delta_two):
        skeleton = one_skeleton(delta_two)
        assert skeleton.number_of_nodes() == 2
        assert skeleton.number_of_edges() == 1
        assert "Delta_2" in to_dot(delta_two)

    def test_lookup(self, delta_two):
        assert delta_two.cells[delta_two.lookup(delta_two.cells[0].representative)] == delta_two.cells[0]

    def test_facet_identities_on_edges(self, delta_two):
        # 1-単体だけの複体でも落ちない
        assert check_facet_identities(delta_two) == []


class TestDeltaOne:
    def test_point(self):
        d = build_delta(1)
        assert f_vector(d) == [1]
        assert is_connected(d)
        assert euler_characteristic(d) == 1
        assert collapse_search(d).collapsible


class TestDeltaThree:
    """Δ_3 の構造"""

    def test_pure_and_connected(self, delta_three):
        dim, pure = dimension_and_purity(delta_three)
        assert pure
        assert is_connected(delta_three)
        assert f_vector(delta_three)[0] == 8

    def test_dimension_report(self, delta_three):
        report = report_dimension(delta_three)
        assert report["computed"] == delta_three.dimension == 3
        assert report["formula"] == 3
        assert report["stated"] == 4

    def test_euler_characteristic(self, delta_three):
        assert euler_characteristic(delta_three) == 1

    def test_facet_identities(self, delta_three):
        assert check_facet_identities(delta_three) == []
        assert check_forest_condition(delta_three) == []

    def test_facet_counts(self, delta_three):
        for i, cell in enumerate(delta_three.cells):
            expected = cell.depth if cell.depth > 1 else 0
            assert len(delta_three.facets[i]) == expected
            for target, _ in delta_three.facets[i]:
                assert delta_three.dim(target) == cell.dim - 1

    def test_collapsible(self, delta_three):
        certificate = collapse_search(delta_three, seed=0)
        assert certificate.verdict == "collapsible"
        assert replay_certificate(delta_three, certificate)
        assert len(certificate.steps) == (len(delta_three.cells) - 1) // 2

    def test_collapse_is_reproducible(self, delta_three):
        first = collapse_search(delta_three, seed=3)
        second = collapse_search(delta_three, seed=3)
        assert first.steps == second.steps
        assert first.seed == second.seed

    def test_vertex_in_a_single_simplex(self, delta_three):
        corner = delta_three.lookup(FilteredGraph.trivial(double_edge_with_loops()))
        (simplex,) = simplices_containing(delta_three, corner)
        assert delta_three.dim(simplex) == 3
        assert vertices_of(delta_three, simplex)[2] == corner
        assert is_isomorphic(delta_three.cells[simplex].graph, doubled_square())

    def test_unique_top_simplex_vertices(self, delta_three):
        corner = delta_three.lookup(FilteredGraph.trivial(double_edge_with_loops()))
        assert list(vertices_in_unique_top_simplex(delta_three)) == [corner]
        for v in delta_three.cells_of_dim(0):
            if v != corner:
                assert len(simplices_containing(delta_three, v)) >= 2


class TestCollapseSearch:
    """汎用の面束上の崩壊探索"""

    def test_filled_triangle_collapses(self):
        poset = filled_triangle()
        certificate = collapse_search(poset, seed=1)
        assert certificate.collapsible
        assert replay_certificate(poset, certificate)
        assert len(certificate.steps) == 3

    def test_circle_does_not_collapse(self):
        circle = FacePoset([0, 0, 0, 1, 1, 1], [{}, {}, {}, {0: 1, 1: 1}, {1: 1, 2: 1}, {0: 1, 2: 1}])
        certificate = collapse_search(circle, seed=0, restarts=4)
        assert certificate.verdict == "unknown"
        assert len(certificate.remaining) == 6

    def test_double_cover_is_not_free(self):
        # 1 頂点に両端を貼った 1-セル (重複度 2)
        loop = FacePoset([0, 1], [{}, {0: 2}])
        assert collapse_search(loop).verdict == "unknown"

    def test_budget_exhaustion(self):
        certificate = collapse_search(filled_triangle(), seed=0, budget=1, restarts=5)
        assert certificate.verdict == "unknown"

    def test_replay_rejects_tampered_certificate(self):
        poset = filled_triangle()
        certificate = collapse_search(poset, seed=0)
        tampered = CollapseCertificate("collapsible", list(reversed(certificate.steps)), certificate.seed)
        assert not replay_certificate(poset, tampered)
        assert not replay_certificate(poset, CollapseCertificate("unknown"))

    def test_face_poset_of_delta(self, delta_two):
        poset = face_poset(delta_two)
        (edge,) = delta_two.cells_of_dim(1)
        assert sum(poset.faces[edge].values()) == 2
        assert all(poset.cofaces[v] == {edge: 1} for v in delta_two.cells_of_dim(0))
