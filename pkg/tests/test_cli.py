import json

import pytest

from dpkernel import vdp_split
from dpkernel.cli import main, verify_equivalence
from dpkernel.core import Solution, parse_instance, serialize_instance
from dpkernel.oracle import check_solution
from helpers import complete_edges, make

FIELDS = {"seed", "class", "problem", "n", "m", "k", "answer", "kernel_n", "kernel_k", "rules_fired", "wall_ms"}


def write(tmp_path, inst, name="inst.txt"):
    p = tmp_path / name
    p.write_text(serialize_instance(inst))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_recognize(tmp_path, capsys):
    path = write(tmp_path, make(3, complete_edges([1, 2, 3]), [(1, 2)]))
    code, out, _ = run(capsys, "recognize", path)
    assert code == 0 and out.split() == ["clique", "split", "threshold", "block", "cliquepath"]


def test_kernelize_yes_no_reduced(tmp_path, capsys):
    yes = write(tmp_path, make(4, complete_edges([1, 2, 3, 4]), [(1, 2)]), "yes.txt")
    no = write(tmp_path, make(2, [(1, 2)], [(1, 2), (1, 2)]), "no.txt")
    assert run(capsys, "kernelize", yes)[0] == 0
    assert run(capsys, "kernelize", no)[0] == 1
    tight = make(6, complete_edges([1, 2, 3]) + complete_edges([4, 5, 6]) + [(3, 4)],
                 [(1, 5), (2, 6), (1, 2)])
    assert run(capsys, "kernelize", "--class", "block", write(tmp_path, tight, "t.txt"))[0] == 1


def test_kernelize_reduced_output_parses(tmp_path, capsys):
    inst = make(9, complete_edges([1, 2, 3, 4, 5]) + [(6, 1), (6, 2), (7, 1), (8, 4), (8, 5), (9, 3)],
                [(1, 2), (1, 2), (4, 5), (6, 9)], "vdp", clique={1, 2, 3, 4, 5})
    code, out, _ = run(capsys, "kernelize", write(tmp_path, inst))
    assert code == 2
    assert "# vdp-unique: true" in out and "TRACE" in out
    body = out.split("TRACE")[0].split("\n", 1)[1]
    assert parse_instance(body).problem == "vdp"


def test_kernelize_split_constants(tmp_path, capsys):
    inst = make(5, complete_edges([1, 2, 3]) + [(4, 1), (4, 2), (5, 3), (5, 1)], [(1, 2), (2, 3), (4, 5)],
                clique={1, 2, 3})
    path = write(tmp_path, inst)
    code, out, _ = run(capsys, "kernelize", "--class", "split", "--oracle-below", "0",
                       "--constants", "rich=2,quota=1", path)
    assert code == 2 and "size C" in out
    assert run(capsys, "kernelize", "--class", "split", "--constants", "fast=1", path)[0] == 4


def test_solve_prints_checked_witness(tmp_path, capsys):
    inst = make(4, [(1, 2), (2, 3), (3, 4), (1, 4)], [(1, 3), (3, 1)], "edp")
    code, out, _ = run(capsys, "solve", write(tmp_path, inst))
    assert code == 0
    paths = tuple(tuple(map(int, l.split())) for l in out.split("WITNESS\n")[1].splitlines())
    assert not check_solution(inst, Solution(paths, "edp"))


def test_solve_poly_and_fallback(tmp_path, capsys):
    no = make(4, [(1, 2), (1, 3), (2, 4)], [(1, 3), (1, 3)], "vdp")
    assert run(capsys, "solve", "--poly", write(tmp_path, no))[0] == 1
    cyc = make(4, [(1, 2), (2, 3), (3, 4), (1, 4)], [(1, 3)], "vdp")
    code, _, err = run(capsys, "solve", "--poly", write(tmp_path, cyc, "c.txt"))
    assert code == 0 and "no polynomial solver" in err


def test_solve_budget(tmp_path, capsys):
    inst = make(9, complete_edges(range(1, 10)), [(1, 2)] * 5 + [(3, 4)] * 3, "vdp")
    assert run(capsys, "solve", "--budget", "3", write(tmp_path, inst))[0] == 5


def test_gen_is_deterministic(capsys):
    a = run(capsys, "gen", "--class", "wpc", "--problem", "vdp", "--seed", "9")[1]
    b = run(capsys, "gen", "--class", "wpc", "--problem", "vdp", "--seed", "9")[1]
    assert a == b and parse_instance(a).tree is not None


def test_gen_planted_witness(tmp_path, capsys):
    wit = tmp_path / "w.txt"
    code, out, _ = run(capsys, "gen", "--class", "split", "--n", "9", "--k", "2", "--seed", "4",
                       "--planted", "yes", "--witness", str(wit))
    inst = parse_instance(out)
    paths = tuple(tuple(map(int, l.split())) for l in wit.read_text().splitlines())
    assert code == 0 and not check_solution(inst, Solution(paths, "edp"))


def test_transform(tmp_path, capsys):
    path = write(tmp_path, make(4, [(1, 2), (2, 3), (3, 4), (1, 4)], [(1, 3)]))
    code, out, _ = run(capsys, "transform", "completeify", path)
    inst = parse_instance(out)
    assert code == 0 and inst.graph.m == 6 and inst.k == 3


def test_verify_single_file(tmp_path, capsys):
    path = write(tmp_path, make(5, complete_edges([1, 2, 3]) + complete_edges([3, 4, 5]), [(1, 5)]))
    code, out, _ = run(capsys, "verify", "--pipeline", "edp-block", path)
    rep = json.loads(out)
    assert code == 0 and rep["match"] and rep["original"] == "yes"


def test_verify_batch_json_lines(capsys):
    code, out, err = run(capsys, "verify", "--pipeline", "edp-threshold", "--trials", "20")
    rows = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and len(rows) == 20
    assert all(FIELDS <= row.keys() and row["match"] for row in rows)
    assert "0 mismatches" in err


def test_verify_parallel(capsys):
    code, out, _ = run(capsys, "verify", "--pipeline", "vdp-wpc", "--trials", "6", "--jobs", "2")
    assert code == 0 and len(out.splitlines()) == 6


def test_injected_bug_caught(capsys, monkeypatch):
    monkeypatch.setattr(vdp_split, "rr1_cut", lambda wg, s, t: None)
    code, out, _ = run(capsys, "verify", "--pipeline", "vdp-split", "--seed", "190", "--trials", "10")
    assert code == 3
    assert any(json.loads(l)["match"] is False for l in out.splitlines())


def test_zero_pairs_equivalent():
    rep = verify_equivalence(make(3, complete_edges([1, 2, 3]), [], "vdp"), "vdp-split")
    assert rep.match and rep.original == rep.kernel == "yes"


def test_bench_fields(capsys):
    code, out, _ = run(capsys, "bench", "--pipeline", "edp-cliquepath", "--trials", "3")
    rows = [json.loads(l) for l in out.splitlines()]
    assert code == 0 and all(FIELDS <= row.keys() for row in rows)


@pytest.mark.parametrize("text", ["garbage\n", "p dp 2 1 1 edp\ne 1 2\nt 1 1\n"])
def test_input_errors(tmp_path, capsys, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    code, _, err = run(capsys, "solve", str(p))
    assert code == 4 and err.startswith("error")


def test_missing_file(capsys):
    assert run(capsys, "solve", "/nonexistent/instance.txt")[0] == 4


def test_wrong_class_is_input_error(tmp_path, capsys):
    path = write(tmp_path, make(4, [(1, 2), (2, 3), (3, 4), (1, 4)], [(1, 3)]))
    assert run(capsys, "kernelize", "--class", "threshold", path)[0] == 4
