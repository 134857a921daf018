import subprocess
import sys

import pytest

from cechdescent import io
from cechdescent.cli import main

PC4 = ["--space", "pc4.space", "--cover", "cd.cover"]


def run(capsys, *argv):
    code = main([*argv, "--format", "machine"])
    out = capsys.readouterr()
    return code, dict(line.split("=", 1) for line in out.out.splitlines()), out


def test_pi1_example(capsys):
    code, kv, _ = run(capsys, "pi1", *PC4, "--base", "c")
    assert code == 0 and (kv["generators"], kv["relators"]) == ("1", "0")


def test_compare_counts_example(capsys):
    code, kv, _ = run(capsys, "compare-counts", "--nerve", "tet.nerve", "--group", "s3.group")
    assert code == 0
    assert kv == {"hom": "1", "h1": "1", "torsor": "1", "equal": "true"}


def test_seq_check_example(capsys):
    code, kv, _ = run(capsys, "seq-check", "--object", "shiftswap.seq")
    assert code == 0
    assert (kv["locally_constant"], kv["covering_projection"]) == ("true", "false")
    code, kv, _ = run(capsys, "seq-check", "--object", "perturbed.seq")
    assert (kv["locally_constant"], kv["covering_projection"], kv["bound"]) == ("true", "true", "6")


@pytest.mark.parametrize("argv, key, value", [
    (["nerve", *PC4], "edges", "2"),
    (["groupoid", *PC4], "generators", "2"),
    (["orbits", *PC4, "--datum", "doublecover.datum"], "orbits", "1"),
    (["atoms", *PC4, "--datum", "trivialcover.datum"], "atoms", "2"),
    (["pi0", *PC4, "--datum", "doublecover.datum"], "certificate", "true"),
    (["check", *PC4, "--datum", "doublecover.datum"], "cocycle", "true"),
    (["cp-test", *PC4, "--datum", "doublecover.datum"], "covering_projection", "true"),
    (["homs", *PC4, "--datum", "doublecover.datum"], "homs", "2"),
    (["glue", *PC4, "--datum", "doublecover.datum"], "local_homeomorphism", "true"),
    (["trivialize", *PC4, "--datum", "doublecover.datum"], "round_trip", "true"),
    (["refine", "--space", "pc4.space", "--cover", "minimal", "--cover2", "cd.cover"], "refines", "true"),
    (["sieve", *PC4], "covering", "true"),
    (["pro-eval", "--space", "pc4.space", "--cover", "whole", "--cover", "cd.cover",
      "--cover", "minimal", "--group", "z3.group"], "counts", "1,3,3"),
    (["h1", "--nerve", "circle3arc.nerve", "--group", "z2.group"], "classes", "2"),
    (["torsor-from-cocycle", "--nerve", "circle3arc.nerve", "--group", "z3.group",
      "--values", "e01=1,e12=0,e02=0"], "orbits", "1"),
])
def test_subcommands(capsys, argv, key, value):
    code, kv, _ = run(capsys, *argv)
    assert code == 0 and kv[key] == value


def test_pullback_prints_a_datum(capsys):
    code, _, out = run(capsys, "pullback", "--space", "pc4.space", "--cover", "minimal",
                       "--cover2", "cd.cover", "--datum", "doublecover.datum")
    assert code == 0
    lines = [ln.split("=", 1)[1] for ln in out.out.splitlines()]
    assert lines[0].startswith("datum doublecover-pulled")
    assert sum(ln.startswith("fiber") for ln in lines) == 4


def test_exit_codes(capsys):
    # negative verdict
    code, kv, _ = run(capsys, "trivialize", *PC4, "--datum", "doublecover.datum", "--cover2", "whole")
    assert code == 1 and kv["trivialized"] == "false"
    code, kv, _ = run(capsys, "refine", "--space", "pc4.space", "--cover", "whole", "--cover2", "cd.cover")
    assert code == 1 and kv["refines"] == "false"
    # domain error
    code, _, out = run(capsys, "seq-check", "--object", "nope.seq")
    assert code == 2 and "no such file" in out.err
    code, _, out = run(capsys, "h1", "--nerve", "tet.nerve", "--group", "s3.group", "--limit", "10")
    assert code == 1 and out.err.startswith("error:")


def test_parse_error_exit(capsys, tmp_path):
    bad = tmp_path / "bad.space"
    bad.write_text("points: a a\n")
    code, _, _ = run(capsys, "nerve", "--space", str(bad), "--cover", "whole")
    assert code == 2


def test_human_format(capsys):
    assert main(["compare-counts", "--nerve", "tet.nerve", "--group", "s3.group"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0].split() == ["hom", "1"] and "=" not in out


def test_machine_output_is_deterministic():
    argv = [sys.executable, "-m", "cechdescent.cli", "h1", "--nerve", "tet.nerve",
            "--group", "s3.group", "--format", "machine"]
    runs = [subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(2)]
    assert runs[0] == runs[1] and runs[0].startswith(b"classes=1")


def test_every_corpus_file_is_findable():
    for name in ("pc4.space", "tet.nerve", "s3.group", "shiftswap.seq"):
        assert io.resolve(name).exists()
