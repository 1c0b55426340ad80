import random

import pytest
from hypothesis import given, settings, strategies as st

from brute import brute_min_total
from dpkernel.core import Solution
from dpkernel.gen import CLASSES, generate
from dpkernel.oracle import BudgetExceeded, Infeasible, check_solution, minimum_solution, solve_exact
from helpers import complete_edges, make

# split graph with clique {1, 2}; 3 hangs off 1, 4 hangs off 2
FIG_NO = make(4, [(1, 2), (1, 3), (2, 4)], [(1, 3), (1, 3)], "vdp", clique={1, 2})


def test_k2_single_pair():
    sol = solve_exact(make(2, [(1, 2)], [(1, 2)]))
    assert sol.paths == ((1, 2),)


def test_repeated_pendant_pair_is_infeasible():
    assert isinstance(solve_exact(FIG_NO), Infeasible)
    assert isinstance(minimum_solution(FIG_NO), Infeasible)


def test_triangle_two_copies_edp():
    # exhaustive enumeration of path pairs gives exactly one solution up to order
    sol = minimum_solution(make(3, complete_edges([1, 2, 3]), [(1, 2), (1, 2)]))
    assert sorted(sol.paths) == [(1, 2), (1, 3, 2)]


def test_adjacent_pair_vdp_uses_the_edge():
    inst = make(4, complete_edges([1, 2, 3, 4]), [(1, 2)], "vdp")
    assert minimum_solution(inst).paths == ((1, 2),)


def test_checker_rejects_shared_interior():
    inst = make(4, [(1, 3), (3, 2), (3, 4)], [(1, 2), (3, 4)], "vdp")
    assert check_solution(inst, Solution(((1, 3, 2), (3, 4)), "vdp"))
    assert isinstance(solve_exact(inst), Infeasible)


def test_checker_rejects_shared_edge():
    inst = make(3, complete_edges([1, 2, 3]), [(1, 2), (1, 2)])
    assert check_solution(inst, Solution(((1, 2), (1, 2)), "edp"))


def test_checker_rejects_identical_vdp_paths():
    inst = make(3, [(1, 2)], [(1, 2), (2, 1)], "vdp")
    assert check_solution(inst, Solution(((1, 2), (2, 1)), "vdp"))


def test_budget_exceeded():
    inst = make(9, complete_edges(range(1, 10)), [(1, 2)] * 5 + [(3, 4)] * 3, "vdp")
    with pytest.raises(BudgetExceeded):
        solve_exact(inst, budget=3)


def test_empty_pair_set():
    assert solve_exact(make(2, [], [])).paths == ()


@pytest.mark.parametrize("seed", range(200))
def test_agrees_with_exhaustive_enumeration(seed):
    rng = random.Random(seed)
    cls, problem = rng.choice(CLASSES), rng.choice(("edp", "vdp"))
    inst = generate(cls, problem, rng.randint(3, 8), rng.randint(1, 3), rng.choice((0.3, 0.6)), seed)
    best = brute_min_total(inst)
    found, low = solve_exact(inst), minimum_solution(inst)
    if best is None:
        assert isinstance(found, Infeasible) and isinstance(low, Infeasible)
    else:
        assert not check_solution(inst, found) and not check_solution(inst, low)
        assert low.total_edges == best <= found.total_edges


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 7), st.data())
def test_random_graphs_match_enumeration(n, data):
    edges = data.draw(st.sets(st.sampled_from(complete_edges(range(1, n + 1))), max_size=12))
    k = data.draw(st.integers(1, 3))
    pairs = data.draw(st.lists(st.tuples(st.integers(1, n), st.integers(1, n)).filter(lambda p: p[0] != p[1]),
                               min_size=k, max_size=k))
    for problem in ("edp", "vdp"):
        inst = make(n, sorted(edges), pairs, problem)
        best, low = brute_min_total(inst), minimum_solution(inst)
        assert (best is None) == isinstance(low, Infeasible)
        if best is not None:
            assert low.total_edges == best
