"""
Oracle Module

Ground-truth engines for desk-scale instances: exact integer linear algebra
(Bareiss determinant, integer solvability by unimodular row reduction),
spanning-tree enumeration and counting, recurrent-configuration enumeration
and chip-firing equivalence with a checkable witness.
"""

import math
from dataclasses import dataclass
from itertools import product

from chipfiring import settings
from chipfiring.bijection import SpanningTree
from chipfiring.dynamics import Configuration, check_configuration, is_critical
from chipfiring.multigraph import reduced_laplacian


class InstanceTooLargeError(ValueError):
    """Brute-force enumeration refused: instance exceeds the configured guards."""


@dataclass(frozen=True)
class EquivalenceWitness:
    """Firing vector f on the non-sink vertices with Q_bar f = D2 - D1."""
    firing_vector: tuple

    def verify(self, g, D1, D2):
        return reduced_laplacian(g).matvec(self.firing_vector) == (D2 - D1).chips


def bareiss_determinant(matrix):
    """Fraction-free Gaussian elimination; every division is exact."""
    a = matrix.to_lists()
    size = len(a)
    if size == 0:
        return 1
    sign = 1
    previous = 1
    for k in range(size - 1):
        if a[k][k] == 0:
            for i in range(k + 1, size):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // previous
            a[i][k] = 0
        previous = a[k][k]
    return sign * a[size - 1][size - 1]


def integer_solve(matrix, vector):
    """
    Integer solution x of matrix @ x = vector for a nonsingular square matrix,
    or None when the (unique) rational solution is not integral.
    """
    a = matrix.to_lists()
    rhs = list(vector)
    size = len(a)
    for col in range(size):
        while True:
            nonzero = [r for r in range(col, size) if a[r][col] != 0]
            if not nonzero:
                raise ValueError("integer_solve needs a nonsingular matrix")
            pivot = min(nonzero, key=lambda r: abs(a[r][col]))
            a[col], a[pivot] = a[pivot], a[col]
            rhs[col], rhs[pivot] = rhs[pivot], rhs[col]
            finished = True
            for r in range(col + 1, size):
                if a[r][col]:
                    q = a[r][col] // a[col][col]
                    a[r] = [x - q * y for x, y in zip(a[r], a[col])]
                    rhs[r] -= q * rhs[col]
                    if a[r][col]:
                        finished = False
            if finished:
                break

    solution = [0] * size
    for i in reversed(range(size)):
        remainder = rhs[i] - sum(a[i][j] * solution[j] for j in range(i + 1, size))
        if remainder % a[i][i]:
            return None
        solution[i] = remainder // a[i][i]
    return tuple(solution)


def _guard(g, max_vertices, max_edges):
    max_vertices = settings.ORACLE_MAX_VERTICES if max_vertices is None else max_vertices
    max_edges = settings.ORACLE_MAX_EDGES if max_edges is None else max_edges
    if g.vertex_count > max_vertices:
        raise InstanceTooLargeError(f"Graph has {g.vertex_count} vertices, oracle limit is {max_vertices}")
    if g.edge_count > max_edges:
        raise InstanceTooLargeError(f"Graph has {g.edge_count} edges, oracle limit is {max_edges}")


def enumerate_spanning_trees(g, max_vertices=None, max_edges=None):
    """
    Every spanning tree, by include/exclude backtracking over the edge list
    with component labels for cycle pruning. Sorted by edge-id tuple.
    """
    _guard(g, max_vertices, max_edges)
    needed = g.n
    trees = []

    def backtrack(index, chosen, labels):
        if len(chosen) == needed:
            trees.append(SpanningTree(frozenset(chosen)))
            return
        if g.edge_count - index < needed - len(chosen):
            return
        a, b = g.edge(index + 1)
        if labels[a] != labels[b]:
            old, new = labels[b], labels[a]
            merged = [new if label == old else label for label in labels]
            chosen.append(index + 1)
            backtrack(index + 1, chosen, merged)
            chosen.pop()
        backtrack(index + 1, chosen, labels)

    backtrack(0, [], list(g.vertices))
    trees.sort(key=lambda t: t.sorted_ids())
    return trees


def count_spanning_trees(g):
    """det of the reduced Laplacian (matrix-tree theorem)."""
    return bareiss_determinant(reduced_laplacian(g))


def class_count(g):
    # number of chip-firing equivalence classes
    return count_spanning_trees(g)


def degree_box_volume(g):
    return math.prod(g.degree(v) for v in g.non_sink)


def degree_box(g):
    """Configurations with 0 <= D(v) <= deg(v) - 1, in mixed-radix order."""
    for chips in product(*(range(g.degree(v)) for v in g.non_sink)):
        yield Configuration(chips)


def enumerate_recurrent(g, h, max_vertices=None, max_edges=None, max_box=None):
    """
    Every recurrent configuration: stable ones lie in the degree box
    (singletons are always in the model), filtered by criticality.
    """
    _guard(g, max_vertices, max_edges)
    max_box = settings.ORACLE_MAX_BOX if max_box is None else max_box
    volume = degree_box_volume(g)
    if volume > max_box:
        raise InstanceTooLargeError(f"Degree box has {volume} configurations, oracle limit is {max_box}")
    return [D for D in degree_box(g) if is_critical(g, h, D)]


def equivalent(g, D1, D2):
    """
    Returns:
        tuple: (True, EquivalenceWitness) when D2 - D1 lies in the integer
        column span of the reduced Laplacian, else (False, None)
    """
    check_configuration(g, D1)
    check_configuration(g, D2)
    solution = integer_solve(reduced_laplacian(g), (D2 - D1).chips)
    if solution is None:
        return False, None
    return True, EquivalenceWitness(solution)
