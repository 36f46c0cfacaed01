import json

from goalagenda import corpus
from goalagenda.cli import main


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_corpus_route(capsys):
    code, out, err = run_cli(["analyze", "--corpus", "hanoi_3",
                              "--method", "h"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["entries"] == [["on(d3,peg3)"], ["on(d2,d3)"],
                                  ["on(d1,d2)"]]
    assert "analysis" in err


def test_analyze_single_goal(capsys):
    code, out, _ = run_cli(["analyze", "--corpus", "blocks2"], capsys)
    assert code == 0
    assert json.loads(out)["entries"] == [["on(a,b)"]]


def test_analyze_pddl_route(tmp_path, capsys):
    dom = tmp_path / "d.pddl"
    prob = tmp_path / "p.pddl"
    dom.write_text(corpus.domain_text("blocks"))
    prob.write_text(corpus.problem_text("blocks", "three"))
    code, out, _ = run_cli(["analyze", "--domain", str(dom),
                            "--problem", str(prob), "--method", "e"], capsys)
    assert code == 0
    assert json.loads(out)["entries"] == [["on(b,c)"], ["on(a,b)"]]


def test_ground_route_and_unsolvable_exit(tmp_path, capsys):
    ground = tmp_path / "trap.json"
    ground.write_text(corpus.micro_text("trap"))
    code, out, err = run_cli(["plan", "--ground", str(ground),
                              "--method", "h", "--base", "forward"], capsys)
    assert code == 1
    payload = json.loads(out)
    assert payload["status"] == "episode_unsolvable"
    assert payload["failed_episode"] == 2
    assert payload["invertibility_certified"] is False
    assert "uncertified" in err


def test_plan_solved_validates(capsys):
    code, out, _ = run_cli(["plan", "--corpus", "hanoi_3"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["status"] == "solved"
    assert payload["valid"] is True
    assert payload["plan"]["actions"] == 7
    assert [len(ep["plan_steps"]) for ep in payload["episodes"]] == [4, 2, 1]


def test_plan_text_format(capsys):
    code, out, _ = run_cli(["plan", "--corpus", "blocks3",
                            "--format", "text"], capsys)
    assert code == 0
    lines = [l for l in out.splitlines() if not l.startswith(";")]
    assert lines == ["0: pickup(b)", "1: stack(b,c)", "2: pickup(a)",
                     "3: stack(a,b)"]


def test_plan_resource_limit_exit(capsys):
    code, out, _ = run_cli(["plan", "--corpus", "gripper2",
                            "--base", "forward", "--max-states", "2"], capsys)
    assert code == 2
    assert json.loads(out)["status"] == "resource_limit"


def test_graphplan_rejects_adl_input(tmp_path, capsys):
    from test_pddl import ADL_DOMAIN, ADL_PROBLEM

    dom = tmp_path / "d.pddl"
    prob = tmp_path / "p.pddl"
    dom.write_text(ADL_DOMAIN)
    prob.write_text(ADL_PROBLEM)
    code, _, err = run_cli(["plan", "--domain", str(dom), "--problem",
                            str(prob), "--base", "graphplan"], capsys)
    assert code == 3
    assert "STRIPS" in err
    # default base for conditional-effect input is forward search
    code, out, _ = run_cli(["plan", "--domain", str(dom),
                            "--problem", str(prob)], capsys)
    assert code == 0
    assert json.loads(out)["status"] == "solved"


def test_verify_matrix(capsys):
    code, out, _ = run_cli(["verify", "--corpus", "trap"], capsys)
    assert code == 0
    payload = json.loads(out)
    rows = {(r["before"], r["after"]): r for r in payload["pairs"]}
    assert rows[("B", "A")]["h"] is True
    assert rows[("B", "A")]["r"] is False  # the approximation's false positive
    assert rows[("A", "B")]["h"] is False
    assert rows[("A", "B")]["f"] is False
    assert payload["limit_exceeded"] is False


def test_verify_limit_exit(capsys):
    code, out, err = run_cli(["verify", "--corpus", "gripper2",
                              "--max-states", "3"], capsys)
    assert code == 2
    assert "budget" in err
    payload = json.loads(out)
    assert payload["limit_exceeded"] is True
    assert all(r["r"] is None and r["f"] is None for r in payload["pairs"])


def test_graph_dump(capsys):
    code, out, _ = run_cli(["graph-dump", "--corpus", "blocks3"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["leveled_at"] == 4
    assert payload["layers"][0]["facts"] == 7


def test_input_errors(tmp_path, capsys):
    code, _, err = run_cli(["analyze", "--corpus", "nonexistent"], capsys)
    assert code == 3
    code, _, _ = run_cli(["analyze"], capsys)
    assert code == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run_cli(["analyze", "--ground", str(bad)], capsys)
    assert code == 3
    code, _, _ = run_cli(["analyze", "--corpus", "trap",
                          "--ground", str(bad)], capsys)
    assert code == 3


def test_out_file(tmp_path, capsys):
    target = tmp_path / "agenda.json"
    code, out, _ = run_cli(["analyze", "--corpus", "trap", "--out",
                            str(target)], capsys)
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["entries"] == [["B"], ["A"]]
