import sys
from pathlib import Path

import networkx as nx
import pytest

# プロジェクトのルートディレクトリをPYTHONPATHに追加
root_dir = Path(__file__).parent.parent
sys.path.append(str(root_dir))

from src.modules.tropical.enumeration import (
    FilteredClass,
    bouquet,
    degree_sequences,
    double_edged_triangle,
    filtered_structures,
    forests,
    ordered_partitions,
    polygon_with_loops,
    spanning_forest_classes,
    spanning_trees,
    stable_graphs,
    theta_graph,
)
from src.modules.tropical.isomorphism import canonical
from src.modules.tropical.multigraph import FilteredGraph, MultiGraph
from src.utils.error_handler import GraphStructureError, UsageError


def _pairings(stubs):
    if not stubs:
        yield []
        return
    first, rest = stubs[0], stubs[1:]
    for i, other in enumerate(rest):
        for tail in _pairings(rest[:i] + rest[i + 1:]):
            yield [(first, other)] + tail


def stable_graphs_by_pairing(g):
    """半辺の完全マッチングを全て試し、networkx の同型判定で重複を除く"""
    found = []
    seen_edge_lists = set()
    for vertex_count in range(1, 2 * g - 1):
        total = 2 * (vertex_count + g - 1)
        for degrees in degree_sequences(vertex_count, total):
            stubs = [v for v, d in enumerate(degrees) for _ in range(d)]
            for pairing in _pairings(stubs):
                pairs = tuple(sorted(tuple(sorted(p)) for p in pairing))
                if pairs in seen_edge_lists:
                    continue
                seen_edge_lists.add(pairs)
                try:
                    graph = MultiGraph.from_edge_list(list(pairs), vertices=range(vertex_count))
                except GraphStructureError:
                    continue
                if not graph.is_stable():
                    continue
                nxg = graph.to_networkx()
                if not any(nx.is_isomorphic(nxg, other) for other in found):
                    found.append(nxg)
    return found


class TestStableGraphs:
    """安定グラフの列挙のテスト"""

    @pytest.mark.parametrize("g, count", [(1, 1), (2, 2), (3, 8)])
    def test_counts(self, g, count):
        assert len(stable_graphs(g)) == count

    @pytest.mark.slow
    def test_genus_four_count(self):
        assert len(stable_graphs(4)) == 43

    @pytest.mark.parametrize("g", [2, 3])
    def test_matches_pairing_enumeration(self, g):
        assert len(stable_graphs(g)) == len(stable_graphs_by_pairing(g))

    def test_classes_are_stable_and_distinct(self):
        classes = stable_graphs(3)
        assert all(c.representative.is_stable() and c.representative.genus() == 3 for c in classes)
        forms = [c.form for c in classes]
        assert forms == sorted(set(forms))
        assert all(canonical(c.representative) == c.form for c in classes)

    def test_genus_two_classes(self):
        forms = {c.form for c in stable_graphs(2)}
        assert forms == {canonical(theta_graph()), canonical(bouquet(2))}

    def test_invalid_genus(self):
        with pytest.raises(UsageError):
            stable_graphs(0)

    def test_degree_sequences(self):
        assert list(degree_sequences(2, 6)) == [(3, 3)]
        assert list(degree_sequences(2, 8)) == [(5, 3), (4, 4)]
        assert list(degree_sequences(1, 4)) == [(4,)]
        assert list(degree_sequences(3, 8)) == []


class TestForests:
    """森と全域木のテスト"""

    def test_forests_of_theta(self):
        assert sorted(map(sorted, forests(theta_graph()))) == [[], [0], [1], [2]]

    def test_bouquet_has_only_empty_forest(self):
        assert forests(bouquet(3)) == [frozenset()]

    def test_spanning_trees(self):
        graph = double_edged_triangle(2)
        assert len(spanning_trees(graph)) == 5

    @pytest.mark.parametrize("k", [3, 4])
    def test_polygon_spanning_tree_orbits(self, k):
        graph = polygon_with_loops(k)
        assert graph.genus() == k * (k + 1) // 2 + 1
        assert spanning_forest_classes(graph) == k

    @pytest.mark.parametrize("k", [2, 3])
    def test_double_edged_triangle(self, k):
        graph = double_edged_triangle(k)
        assert graph.genus() == k + 1
        assert spanning_forest_classes(graph) == 2

    def test_ordered_partitions(self):
        assert len(list(ordered_partitions([1, 2]))) == 3
        assert len(list(ordered_partitions([1, 2, 3]))) == 13
        assert list(ordered_partitions([])) == []


class TestFilteredStructures:
    """森によるフィルトレーションの列挙のテスト"""

    def test_theta(self):
        classes = filtered_structures(theta_graph())
        assert [c.depth for c in classes] == [1, 2]
        middle = FilteredGraph(theta_graph(), (frozenset({1}), frozenset({0, 2})))
        assert classes[1].form == canonical(middle)

    def test_bouquet(self):
        assert len(filtered_structures(bouquet(2))) == 1

    def test_genus_three_classes(self):
        for stable in stable_graphs(3):
            classes = filtered_structures(stable)
            forms = [c.form for c in classes]
            assert len(forms) == len(set(forms))
            for c in classes:
                assert c.representative.is_filtered_by_forests()
                assert canonical(c.representative) == c.form
                assert c.dim == c.depth - 1

    def test_dedup_by_stabilizer_matches_dedup_by_form(self):
        # K4: 位数 24 の群で森の順序付き分割を割る
        k4 = MultiGraph.from_edge_list([(0, 1), (1, 2), (2, 3), (0, 2), (0, 3), (1, 3)])
        classes = filtered_structures(k4)
        expected = set()
        for forest in forests(k4):
            if not forest:
                continue
            rest = frozenset(k4.edge_ids) - forest
            for blocks in ordered_partitions(sorted(forest)):
                expected.add(canonical(FilteredGraph(k4, blocks + (rest,))))
        expected.add(canonical(k4))
        assert {c.form for c in classes} == expected
        assert len(classes) == len(expected)

    def test_filtered_class_of(self):
        fg = FilteredGraph(theta_graph(), (frozenset({2}), frozenset({0, 1})))
        cls = FilteredClass.of(fg)
        assert cls.depth == 2
        assert cls.graph.genus() == 2
