import pytest

from dpkernel.classes import recognize
from dpkernel.core import serialize_instance
from dpkernel.gen import CLASSES, generate, plant_solution, sample
from dpkernel.oracle import Infeasible, check_solution, solve_exact

EXPECTED_LABEL = {"clique": "clique", "split": "split", "threshold": "threshold",
                  "block": "block", "cliquepath": "cliquepath"}


@pytest.mark.parametrize("cls", CLASSES)
def test_same_seed_same_bytes(cls):
    a = serialize_instance(generate(cls, "edp", 10, 3, 0.5, 42))
    b = serialize_instance(generate(cls, "edp", 10, 3, 0.5, 42))
    assert a == b


@pytest.mark.parametrize("cls", CLASSES)
@pytest.mark.parametrize("seed", range(20))
def test_generated_class_membership(cls, seed):
    inst = generate(cls, "vdp", 2 + seed % 11, 2, 0.5, seed)
    if cls == "wpc":
        assert inst.tree is not None
    else:
        assert EXPECTED_LABEL[cls] in recognize(inst.graph)


@pytest.mark.parametrize("cls", CLASSES)
@pytest.mark.parametrize("problem", ["edp", "vdp"])
@pytest.mark.parametrize("seed", range(8))
def test_planted_instances_are_yes(cls, problem, seed):
    try:
        inst, sol = plant_solution(cls, problem, 12, 3, 0.6, seed)
    except ValueError:
        pytest.skip("generator could not realize three paths here")
    assert not check_solution(inst, sol)
    assert not isinstance(solve_exact(inst), Infeasible)


def test_two_edge_disjoint_paths_in_split_graph():
    inst, sol = plant_solution("split", "edp", 8, 2, 0.5, 3)
    assert inst.k == 2 and not check_solution(inst, sol)
    assert not isinstance(solve_exact(inst), Infeasible)


def test_plant_nothing():
    inst, sol = plant_solution("block", "vdp", 6, 0, 0.5, 1)
    assert inst.k == 0 and sol.paths == ()


def test_bad_parameters():
    with pytest.raises(ValueError):
        generate("split", "edp", 1, 1)
    with pytest.raises(ValueError):
        generate("hexagon", "edp", 5, 1)


def test_sample_respects_ranges():
    for seed in range(50):
        inst = sample("threshold", "edp", seed, (5, 7), (2, 3))
        assert 5 <= inst.n <= 7 and 2 <= inst.k <= 3
