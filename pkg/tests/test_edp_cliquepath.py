import pytest

from dpkernel.classes import block_decomposition
from dpkernel.edp_block import restrict_to_block
from dpkernel.edp_cliquepath import PairTypeCounts, classify_pairs, kernelize_cliquepath_edp, rrc2_contracts
from dpkernel.edp_split import PreconditionError
from dpkernel.gen import sample
from helpers import answer, complete_edges, implied, make


def block_id(inst, members):
    return block_decomposition(inst.graph).blocks.index(frozenset(members))


# chain of triangles {1,2,6} - {2,3,4} - {3,5,7}; the middle one has cut vertices 2 and 3
CHAIN_EDGES = complete_edges([1, 2, 6]) + complete_edges([2, 3, 4]) + complete_edges([3, 5, 7])


def test_pairs_between_the_cut_vertices():
    inst = make(7, CHAIN_EDGES, [(1, 5), (6, 7), (2, 3)])
    t = classify_pairs(inst, block_id(inst, {2, 3, 4}))
    assert (t.a, t.b, t.c, t.d) == (3, 0, 0, 0)


def test_hand_classification():
    # seen from the middle block: 1,6 map to 2 and 5,7 map to 3
    inst = make(7, CHAIN_EDGES, [(1, 5), (6, 4), (4, 7), (1, 6), (4, 2)])
    t = classify_pairs(inst, block_id(inst, {2, 3, 4}))
    assert t.cuts == (2, 3)
    assert (t.a, t.b, t.c, t.d) == (1, 2, 1, 0)


@pytest.mark.parametrize("seed", range(60))
def test_counts_sum_to_restricted_pairs(seed):
    inst = sample("cliquepath", "edp", seed)
    d = block_decomposition(inst.graph)
    if len(d.blocks) < 2:
        return
    for i in range(len(d.blocks)):
        assert classify_pairs(inst, i).total == restrict_to_block(inst, i).k


def test_overloaded_middle_block_is_no():
    inst = make(7, CHAIN_EDGES, [(1, 5), (6, 7), (1, 4)])
    t = classify_pairs(inst, block_id(inst, {2, 3, 4}))
    assert (t.a, t.b, t.c) == (2, 1, 0)
    out = kernelize_cliquepath_edp(inst)
    assert out.status == "no" and out.trace.steps[-1].rule == "RRC3"
    assert answer(inst) == "no"


def test_lightly_used_end_block_contracted():
    assert rrc2_contracts(3, PairTypeCounts((1,), b=1, d=0))
    inst = make(7, complete_edges([1, 2, 3]) + complete_edges([3, 4, 5]) + complete_edges([5, 6, 7]),
                [(1, 4), (6, 7), (6, 7)])
    t = classify_pairs(inst, block_id(inst, {1, 2, 3}))
    assert (t.b, t.d) == (1, 0)
    out = kernelize_cliquepath_edp(inst)
    assert any(s.rule == "RRC2" and {1, 2} <= set(s.vertices) for s in out.trace.steps)
    assert implied(out) == answer(inst)


def test_single_clique_larger_than_k():
    inst = make(4, complete_edges([1, 2, 3, 4]), [(1, 2), (1, 2), (3, 4)])
    out = kernelize_cliquepath_edp(inst)
    assert out.status == "yes" and out.witness is not None


def test_branching_block_rejected():
    with pytest.raises(PreconditionError):
        kernelize_cliquepath_edp(make(6, complete_edges([1, 2, 3]) + [(1, 4), (2, 5), (3, 6)], [(4, 5)]))


@pytest.mark.parametrize("seed", range(150))
def test_answer_and_size(seed):
    inst = sample("cliquepath", "edp", seed)
    out = kernelize_cliquepath_edp(inst)
    assert implied(out) == answer(inst)
    if out.status == "reduced":
        assert out.instance.n <= 2 * out.instance.k + 1
