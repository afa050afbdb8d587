"""
Tests for qubit-wise compatible grouping and basis selection.
"""

import numpy as np
import pandas as pd
import pytest

from algorithms.grouping import (
    build_commutation_graph,
    conflict_matrix,
    greedy_group,
    offdiagonal_ratio,
    planning_table,
    select_bases,
    select_groups,
)
from algorithms.jordan_wigner import jw_map
from algorithms.pauli import PauliString, PauliSum
from utils.errors import DegenerateHamiltonianError


@pytest.fixture
def h2_pauli(h2):
    return jw_map(h2)


class TestConflicts:
    """Qubit-wise compatibility as a matrix and as a graph"""

    def test_matrix_matches_pairwise_check(self):
        strings = [PauliString.from_label(label) for label in ["XIZ", "XYI", "ZII", "IIZ", "YYY"]]
        matrix = conflict_matrix(strings)
        for i, a in enumerate(strings):
            for j, b in enumerate(strings):
                assert matrix[i, j] == (not a.qubitwise_compatible(b))
        assert not matrix.diagonal().any()

    def test_empty_input(self):
        assert conflict_matrix([]).shape == (0, 0)

    def test_graph_skips_identity(self, h2_pauli):
        graph = build_commutation_graph(h2_pauli)
        assert graph.number_of_nodes() == len(h2_pauli) - 1
        for node, data in graph.nodes(data=True):
            assert data["weight"] == pytest.approx(abs(h2_pauli[node]))
        for a, b in graph.edges():
            assert not a.qubitwise_compatible(b)


class TestGreedyGroup:
    """Partitioning of Pauli terms"""

    def test_h2_groups(self, h2_pauli):
        groups = greedy_group(h2_pauli)
        assert len(groups) == 5
        diagonal = [g for g in groups if g.basis.is_all_z]
        assert len(diagonal) == 1
        assert diagonal[0].size == 10

    def test_groups_partition_terms(self, h2_pauli):
        groups = greedy_group(h2_pauli)
        members = [p for g in groups for p in g.terms.strings()]
        assert sorted(members) == sorted(h2_pauli.non_identity().strings())
        assert sum(g.weight for g in groups) == pytest.approx(h2_pauli.one_norm())

    def test_each_group_is_diagonal_in_its_basis(self, random_molecule):
        pauli = jw_map(random_molecule(3, 1, 1, seed=3))
        for group in greedy_group(pauli):
            for string in group.terms.strings():
                assert group.basis.diagonalizes(string)
            strings = group.terms.strings()
            assert not conflict_matrix(strings).any()

    def test_heaviest_term_in_first_group(self):
        pauli = PauliSum.from_labels([("XX", 0.2), ("ZI", 1.0), ("IY", 0.5)])
        groups = greedy_group(pauli)
        assert PauliString.from_label("ZI") in groups[0].terms

    def test_identity_only(self):
        assert greedy_group(PauliSum.identity(3, 2.0)) == []

    def test_deterministic(self, random_molecule):
        pauli = jw_map(random_molecule(3, 2, 1, seed=8))
        first = [g.basis.letters for g in greedy_group(pauli)]
        second = [g.basis.letters for g in greedy_group(pauli)]
        assert first == second


class TestSelectGroups:
    """Top-k selection with the all-Z basis forced in"""

    def test_all_z_replaces_lightest_pick(self):
        pauli = PauliSum.from_labels([("XX", 1.0), ("ZI", 0.1)])
        selected = select_groups(greedy_group(pauli), 1, pauli)
        assert [g.basis.letters for g in selected] == ["ZZ"]

    def test_all_z_synthesized_when_missing(self):
        pauli = PauliSum.from_labels([("XI", 1.0), ("IZ", 0.5)])
        groups = greedy_group(pauli)
        assert [g.basis.letters for g in groups] == ["XZ"]

        selected = select_groups(groups, 2, pauli)
        assert [g.basis.letters for g in selected] == ["XZ", "ZZ"]
        assert selected[1].weight == pytest.approx(0.5)

        only = select_groups(groups, 1, pauli)
        assert [g.basis.letters for g in only] == ["ZZ"]

    def test_k_larger_than_group_count(self, h2_pauli):
        groups = greedy_group(h2_pauli)
        assert len(select_groups(groups, 50)) == len(groups)

    def test_always_contains_all_z(self, random_molecule):
        pauli = jw_map(random_molecule(3, 1, 2, seed=6))
        groups = greedy_group(pauli)
        for k in range(1, len(groups) + 1):
            bases = select_bases(groups, k, pauli)
            assert len(bases) == k
            assert any(b.is_all_z for b in bases)

    def test_heaviest_first(self, h2_pauli):
        selected = select_groups(greedy_group(h2_pauli), 3)
        weights = [g.weight for g in selected]
        assert weights == sorted(weights, reverse=True)

    def test_rejects_zero_k(self, h2_pauli):
        with pytest.raises(ValueError):
            select_groups(greedy_group(h2_pauli), 0)


class TestOffdiagonalRatio:
    def test_ratio(self):
        pauli = PauliSum.from_labels([("II", 5.0), ("XX", 1.0), ("ZI", -3.0)])
        assert offdiagonal_ratio(pauli) == pytest.approx(0.25)

    def test_h2_is_mostly_diagonal(self, h2_pauli):
        assert 0.0 < offdiagonal_ratio(h2_pauli) < 0.5

    def test_identity_only_raises(self):
        with pytest.raises(DegenerateHamiltonianError):
            offdiagonal_ratio(PauliSum.identity(2, 1.0))


class TestPlanningTable:
    def test_columns_and_cumulative(self, h2_pauli):
        table = planning_table(greedy_group(h2_pauli))
        assert isinstance(table, pd.DataFrame)
        assert list(table.columns) == ["basis", "terms", "weight", "cumulative_fraction", "all_z"]
        assert table["cumulative_fraction"].iloc[-1] == pytest.approx(1.0)
        assert np.all(np.diff(table["weight"].to_numpy()) <= 1e-15)
        assert table["terms"].sum() == 14

    def test_empty(self):
        table = planning_table([])
        assert table.empty
