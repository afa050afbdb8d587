"""
Measurement planning: qubit-wise compatible grouping of Pauli terms.

Two strings conflict when some qubit carries two different non-identity
letters. Groups are the colour classes of a greedy colouring of the conflict
graph, visiting terms by descending coefficient magnitude.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence
import logging

import networkx as nx
import numpy as np
import pandas as pd

from algorithms.pauli import MeasurementBasis, PauliString, PauliSum
from utils.errors import DegenerateHamiltonianError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeasurementGroup:
    """
    Terms measurable together after one layer of single-qubit rotations.

    Attributes:
        basis: Shared measurement basis (identity-only qubits default to Z)
        terms: Sub-sum whose strings are all diagonal in ``basis``
        weight: Sum of |coefficient| over ``terms``
    """

    basis: MeasurementBasis
    terms: PauliSum
    weight: float

    @property
    def size(self) -> int:
        return len(self.terms)


def _visit_order(pauli_sum: PauliSum) -> List[PauliString]:
    return sorted(
        pauli_sum.strings(),
        key=lambda p: (-abs(pauli_sum[p]), p.label),
    )


def conflict_matrix(strings: Sequence[PauliString]) -> np.ndarray:
    """Boolean matrix: True where two strings are not qubit-wise compatible."""
    if not strings:
        return np.zeros((0, 0), dtype=bool)
    x = np.array([p.x for p in strings], dtype=object)
    z = np.array([p.z for p in strings], dtype=object)
    support = x | z
    differ = (x[:, None] ^ x[None, :]) | (z[:, None] ^ z[None, :])
    return ((differ & support[:, None] & support[None, :]) != 0).astype(bool)


def build_commutation_graph(pauli_sum: PauliSum) -> nx.Graph:
    """
    Conflict graph over the non-identity terms.

    Args:
        pauli_sum: Operator to plan

    Returns:
        networkx Graph with PauliString nodes (attribute ``weight`` = |coefficient|)
        and an edge for every qubit-wise incompatible pair
    """
    strings = _visit_order(pauli_sum.non_identity())
    graph = nx.Graph()
    for pauli in strings:
        graph.add_node(pauli, weight=abs(pauli_sum[pauli]))
    conflicts = conflict_matrix(strings)
    rows, cols = np.nonzero(np.triu(conflicts, k=1))
    graph.add_edges_from((strings[i], strings[j]) for i, j in zip(rows, cols))
    logger.debug(f"Conflict graph: {graph.number_of_nodes()} nodes, {graph.number_of_edges()} edges")
    return graph


def _group_basis(strings: Sequence[PauliString], n_qubits: int) -> MeasurementBasis:
    x_mask = 0
    z_mask = 0
    for pauli in strings:
        x_mask |= pauli.x
        z_mask |= pauli.z
    letters = []
    for qubit in range(n_qubits):
        bits = ((x_mask >> qubit) & 1, (z_mask >> qubit) & 1)
        letters.append({(1, 0): "X", (1, 1): "Y"}.get(bits, "Z"))
    return MeasurementBasis("".join(letters))


def make_group(pauli_sum: PauliSum, strings: Sequence[PauliString]) -> MeasurementGroup:
    terms = pauli_sum.restricted_to(strings)
    return MeasurementGroup(
        basis=_group_basis(strings, pauli_sum.n_qubits),
        terms=terms,
        weight=terms.one_norm(include_identity=True),
    )


def greedy_group(pauli_sum: PauliSum) -> List[MeasurementGroup]:
    """
    Partition the non-identity terms into qubit-wise compatible groups.

    Each term, in order of descending |coefficient| (ties by label), joins the
    first group it is compatible with.

    Args:
        pauli_sum: Operator to plan

    Returns:
        Groups in colour order (the first group holds the largest term)
    """
    graph = build_commutation_graph(pauli_sum)
    if graph.number_of_nodes() == 0:
        return []
    order = _visit_order(pauli_sum.non_identity())
    colouring = nx.coloring.greedy_color(graph, strategy=lambda g, colors: iter(order))

    members: Dict[int, List[PauliString]] = {}
    for pauli in order:
        members.setdefault(colouring[pauli], []).append(pauli)
    groups = [make_group(pauli_sum, members[colour]) for colour in sorted(members)]
    logger.info(f"Grouped {len(order)} non-identity terms into {len(groups)} measurement groups")
    return groups


def rank_groups(groups: Sequence[MeasurementGroup]) -> List[MeasurementGroup]:
    """Sort by descending weight, ties by basis string."""
    return sorted(groups, key=lambda g: (-g.weight, g.basis.letters))


def _diagonal_group(pauli_sum: PauliSum) -> Optional[MeasurementGroup]:
    diagonal = [p for p in pauli_sum.strings() if p.is_diagonal and not p.is_identity]
    if not diagonal:
        return None
    group = make_group(pauli_sum, diagonal)
    return MeasurementGroup(MeasurementBasis.all_z(pauli_sum.n_qubits), group.terms, group.weight)


def select_groups(
    groups: Sequence[MeasurementGroup],
    k: int,
    pauli_sum: Optional[PauliSum] = None,
) -> List[MeasurementGroup]:
    """
    Pick the ``k`` heaviest groups, always including the all-Z basis.

    When no group has the all-Z basis, one is synthesized from the Z-diagonal
    terms of ``pauli_sum`` (if given). The all-Z group replaces the lowest-weight
    pick when the selection is already full.

    Args:
        groups: Output of greedy_group
        k: Number of bases, k >= 1
        pauli_sum: Operator the groups came from

    Returns:
        Selected groups, heaviest first
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    ranked = rank_groups(groups)
    if k >= len(ranked):
        selected = list(ranked)
    else:
        selected = ranked[:k]

    if not any(g.basis.is_all_z for g in selected):
        all_z = next((g for g in ranked if g.basis.is_all_z), None)
        if all_z is None and pauli_sum is not None:
            all_z = _diagonal_group(pauli_sum)
        if all_z is not None:
            if len(selected) < k:
                selected.append(all_z)
            else:
                selected[-1] = all_z
            selected = rank_groups(selected)
    logger.info(
        f"Selected {len(selected)} of {len(groups)} bases: "
        + ", ".join(f"{g.basis} ({g.weight:.4f})" for g in selected)
    )
    return selected


def select_bases(
    groups: Sequence[MeasurementGroup],
    k: int,
    pauli_sum: Optional[PauliSum] = None,
) -> List[MeasurementBasis]:
    """Bases of :func:`select_groups`."""
    return [g.basis for g in select_groups(groups, k, pauli_sum)]


def offdiagonal_ratio(pauli_sum: PauliSum) -> float:
    """
    Share of non-identity coefficient mass carried by strings with X or Y.

    Raises:
        DegenerateHamiltonianError: no non-identity terms
    """
    total = pauli_sum.one_norm()
    if total == 0.0:
        raise DegenerateHamiltonianError("Hamiltonian has no non-identity terms")
    off = sum(abs(c) for p, c in pauli_sum.items() if not p.is_diagonal)
    return float(off / total)


def planning_table(groups: Sequence[MeasurementGroup]) -> pd.DataFrame:
    """
    Tidy plan table: one row per group, heaviest first.

    Returns:
        pandas DataFrame with columns basis, terms, weight, cumulative_fraction, all_z
    """
    ranked = rank_groups(groups)
    total = sum(g.weight for g in ranked) or 1.0
    rows = []
    cumulative = 0.0
    for group in ranked:
        cumulative += group.weight
        rows.append(
            {
                "basis": group.basis.letters,
                "terms": group.size,
                "weight": group.weight,
                "cumulative_fraction": cumulative / total,
                "all_z": group.basis.is_all_z,
            }
        )
    return pd.DataFrame(rows, columns=["basis", "terms", "weight", "cumulative_fraction", "all_z"])
