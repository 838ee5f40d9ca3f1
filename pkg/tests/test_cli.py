import subprocess
import sys

from dynaph import cli

TRIANGLE = "0 0\n1 1\n2 2\n3 0 2\n4 1 2\n5 0 1\n"
EDGES = dict(u=(0, 3), v=(1, 3), w=(2, 3), x=(0, 1), y=(1, 2), z=(0, 2))


def write_order(path, edge_order):
    lines = [f"{k} {k}" for k in range(4)]
    lines += [f"{4 + k} {a} {b}" for k, (a, b) in enumerate(EDGES[c] for c in edge_order)]
    path.write_text("\n".join(lines) + "\n")
    return str(path)


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_reduce_triangle(tmp_path, capsys):
    f = tmp_path / "tri.txt"
    f.write_text(TRIANGLE)
    code, out, _ = run(capsys, "reduce", f)
    assert code == 0
    assert out.splitlines() == ["dim,birth_index,death_index,birth_grade,death_grade",
                                "0,1,inf,0,inf", "0,2,5,1,4", "0,3,4,2,3", "1,6,inf,5,inf"]
    code, graded, _ = run(capsys, "reduce", f, "--coords=grade", "--check")
    assert code == 0 and graded == out      # grades are distinct here, nothing is dropped


def test_reduce_input_errors(tmp_path, capsys):
    empty = tmp_path / "e.txt"
    empty.write_text("")
    code, _, err = run(capsys, "reduce", empty)
    assert code == 2 and "no simplices" in err
    bad = tmp_path / "b.txt"
    bad.write_text("0 0\n1 0 1\n")
    code, _, err = run(capsys, "reduce", bad)
    assert code == 2 and "b.txt" in err
    code, _, _ = run(capsys, "reduce", tmp_path / "missing.txt")
    assert code == 2


def test_family_naive_single_frame_matches_reduce(tmp_path, capsys):
    f = tmp_path / "tri.txt"
    f.write_text(TRIANGLE)
    _, want, _ = run(capsys, "reduce", f)
    code, report, _ = run(capsys, "family", f, "--strategy=naive", "--diagrams", tmp_path / "d")
    assert code == 0 and report.startswith("strategy,member_index")
    assert (tmp_path / "d" / "member_0000.csv").read_text() == want


def test_vineyard_and_moves_diagrams_identical(tmp_path, capsys):
    a = write_order(tmp_path / "a.txt", "uvwxyz")
    b = write_order(tmp_path / "b.txt", "xyzuvw")
    for s in ("vineyard", "moves", "greedy"):
        assert run(capsys, "family", a, b, f"--strategy={s}", "--diagrams", tmp_path / s)[0] == 0
    for k in range(2):
        name = f"member_{k:04d}.csv"
        assert (tmp_path / "vineyard" / name).read_bytes() == (tmp_path / "moves" / name).read_bytes()
        assert (tmp_path / "greedy" / name).read_bytes() == (tmp_path / "moves" / name).read_bytes()


def test_schedule_subcommand_and_round_trip(tmp_path, capsys):
    a = write_order(tmp_path / "a.txt", "uvwxyz")
    b = write_order(tmp_path / "b.txt", "xyzuvw")
    code, out, err = run(capsys, "schedule", a, a)
    assert code == 0 and out.startswith("moves m=10 count=0")
    sched = tmp_path / "s.txt"
    code, _, err = run(capsys, "schedule", a, b, "-o", sched)
    assert code == 0 and sched.read_text().startswith("moves m=10 count=3")
    assert "d=3" in err and "predicted_col_ops=6" in err
    run(capsys, "family", a, b, "--diagrams", tmp_path / "auto")
    code, _, _ = run(capsys, "family", a, b, "--schedule", sched, "--diagrams", tmp_path / "file")
    assert code == 0
    for k in range(2):
        name = f"member_{k:04d}.csv"
        assert (tmp_path / "auto" / name).read_text() == (tmp_path / "file" / name).read_text()
    other = tmp_path / "o.txt"
    other.write_text("0 0\n1 1\n")
    assert run(capsys, "schedule", a, other)[0] == 2


def test_family_rejects_mixed_sets(tmp_path, capsys):
    a = write_order(tmp_path / "a.txt", "uvwxyz")
    other = tmp_path / "o.txt"
    other.write_text("0 0\n1 1\n")
    code, _, err = run(capsys, "family", a, other)
    assert code == 2 and "simplex set" in err
    assert run(capsys, "family")[0] == 2


def test_invariant_failure_exit_code(tmp_path, capsys, monkeypatch):
    reduce_module = sys.modules["dynaph.reduce"]
    f = tmp_path / "tri.txt"
    f.write_text(TRIANGLE)
    monkeypatch.setattr(reduce_module, "validate", lambda dec, check_cache=True: False)
    code, _, err = run(capsys, "reduce", f, "--check")
    assert code == 3 and "invariant" in err


def test_crocker_from_diagram_dir(tmp_path, capsys):
    a = write_order(tmp_path / "a.txt", "uvwxyz")
    b = write_order(tmp_path / "b.txt", "xyzuvw")
    run(capsys, "family", a, b, "--diagrams", tmp_path / "d")
    code, out, _ = run(capsys, "crocker", "--diagrams", tmp_path / "d", "--dim=0", "--eps=0:9:10",
                       "--alpha=0")
    assert code == 0
    rows = out.splitlines()
    assert rows[0] == "t,eps,alpha,rank" and len(rows) == 1 + 2 * 10
    assert run(capsys, "crocker", "--diagrams", tmp_path / "nope")[0] == 2
    assert run(capsys, "crocker", "--diagrams", tmp_path / "d", "--alpha=-1")[0] == 2


def test_boid_runs_are_seeded(capsys, monkeypatch):
    args = ["crocker", "--gen=boids", "--frames=3", "--alpha=0,0.02", "--eps=0:0.3:4"]
    first = run(capsys, "--seed=5", *args)
    again = run(capsys, "--seed=5", *args)
    assert first[0] == 0 and first[1] == again[1]
    monkeypatch.setenv("DYNAPH_SEED", "5")
    assert run(capsys, *args)[1] == first[1]
    monkeypatch.setenv("DYNAPH_SEED", "five")
    assert run(capsys, *args)[0] == 2


def test_module_entry_point(tmp_path):
    f = tmp_path / "tri.txt"
    f.write_text(TRIANGLE)
    out = subprocess.run([sys.executable, "-m", "dynaph", "reduce", str(f)], capture_output=True, text=True)
    assert out.returncode == 0 and out.stdout.count("\n") == 5
