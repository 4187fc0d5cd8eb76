import io
import re
import subprocess
import sys

import pytest

from cardgroup.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main
from cardgroup.table import ConstantSource, Transcript, audit_transcript

ROLES = """\
n = 9
M = 2,2,1
C[2] = {8}
C[3] = {9}
dummy = 8:Role B, 9:Role C
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def run_cli(*argv, source_factory=None):
    out = io.StringIO()
    code = main(list(argv), out=out, source_factory=source_factory)
    return code, out.getvalue()


class TestRun:
    def test_role_labels(self, tmp_path):
        path = write(tmp_path, "roles.txt", ROLES)
        for seed in range(20):
            code, out = run_cli("run", "--constraint", path, "--seed", str(seed))
            assert code == EXIT_OK
            lines = out.splitlines()
            assert len(lines) == 7  # dummies 8 and 9 are not players
            assert sum("[Role B]" in line for line in lines) == 1
            assert sum("[Role C]" in line for line in lines) == 2

    def test_two_players_are_partners(self, tmp_path):
        path = write(tmp_path, "pair.txt", "n = 2\nM = 0,1\n")
        code, out = run_cli("run", "--constraint", path, "--seed", "9")
        assert code == EXIT_OK
        assert out == "Player 1: group {1,2}\nPlayer 2: group {1,2}\n"

    def test_single_player_option(self, tmp_path):
        path = write(tmp_path, "roles.txt", ROLES)
        code, out = run_cli("run", "--constraint", path, "--seed", "1", "--player", "4")
        assert code == EXIT_OK
        assert re.fullmatch(r"Player 4: group \{[\d,]+\}( \[Role [BC]\])?\n", out)

    def test_no_secrets_by_default(self, tmp_path):
        path = write(tmp_path, "roles.txt", ROLES)
        _, out = run_cli("run", "--constraint", path, "--seed", "3")
        assert "secret" not in out.lower() and "SECRET" not in out
        _, out = run_cli("run", "--constraint", path, "--seed", "3", "--unsafe-secrets")
        assert "secret sigma = " in out and "SECRET sigma perm=" in out

    def test_transcript_written(self, tmp_path):
        path = write(tmp_path, "roles.txt", ROLES)
        tpath = tmp_path / "t.txt"
        assert run_cli("run", "--constraint", path, "--seed", "5", "--transcript", str(tpath))[0] == EXIT_OK
        transcript = Transcript.parse(tpath.read_text())
        assert audit_transcript(transcript) == []
        assert "SECRET" not in tpath.read_text()

    def test_byte_identical_reruns(self, tmp_path):
        path = write(tmp_path, "roles.txt", ROLES)
        outs = []
        for i in range(2):
            tpath = tmp_path / f"t{i}.txt"
            _, out = run_cli("run", "--constraint", path, "--seed", "18446744073709551615", "--transcript", str(tpath))
            outs.append((out, tpath.read_bytes()))
        assert outs[0] == outs[1]

    def test_seed_required(self, tmp_path):
        path = write(tmp_path, "pair.txt", "n = 2\nM = 0,1\n")
        assert run_cli("run", "--constraint", path)[0] == EXIT_INPUT

    def test_seed_range(self, tmp_path):
        path = write(tmp_path, "pair.txt", "n = 2\nM = 0,1\n")
        assert run_cli("run", "--constraint", path, "--seed", "-1")[0] == EXIT_INPUT
        assert run_cli("run", "--constraint", path, "--seed", str(2**64))[0] == EXIT_INPUT


class TestInputErrors:
    def test_bad_file_line_numbers(self, tmp_path, capsys):
        path = write(tmp_path, "bad.txt", "n = 4\nM = 0,2\nC[2] = {1,2,3}\n")
        code, _ = run_cli("run", "--constraint", path, "--seed", "1")
        assert code == EXIT_INPUT
        assert "line 3" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert run_cli("run", "--constraint", str(tmp_path / "nope"), "--seed", "1")[0] == EXIT_INPUT

    def test_unknown_mode(self):
        assert run_cli("dance")[0] == EXIT_INPUT

    def test_bad_significance(self, tmp_path):
        path = write(tmp_path, "pair.txt", "n = 2\nM = 0,1\n")
        args = ("verify-uniformity", "--constraint", path, "--trials", "100", "--significance", "0.2")
        assert run_cli(*args)[0] == EXIT_INPUT

    def test_too_few_trials(self, tmp_path):
        path = write(tmp_path, "four.txt", "n = 4\nM = 0,2\n")
        assert run_cli("verify-uniformity", "--constraint", path, "--trials", "10")[0] == EXIT_INPUT

    def test_oracle_too_large(self, tmp_path):
        path = write(tmp_path, "eleven.txt", "n = 11\nM = 3,2,0,1\n")
        assert run_cli("enumerate", "--constraint", path)[0] == EXIT_INPUT


class TestVerify:
    def test_uniformity_passes(self, tmp_path):
        path = write(tmp_path, "four.txt", "n = 4\nM = 0,2\n")
        report = tmp_path / "report.txt"
        code, out = run_cli("verify-uniformity", "--constraint", path, "--trials", "6000", "--report", str(report))
        assert code == EXIT_OK
        assert "result = pass" in out
        assert report.read_text() == out

    def test_biased_source_fails(self, tmp_path):
        path = write(tmp_path, "four.txt", "n = 4\nM = 0,2\n")
        code, out = run_cli(
            "verify-uniformity", "--constraint", path, "--trials", "600",
            source_factory=lambda t: ConstantSource(),
        )
        assert code == EXIT_FAIL
        assert "result = fail" in out

    def test_independence(self, tmp_path):
        path = write(tmp_path, "six.txt", "n = 6\nM = 0,3\n")
        code, out = run_cli("verify-independence", "--constraint", path, "--trials", "3000", "--seed", "2")
        assert code == EXIT_OK
        assert out.count("result = pass") == 2

    def test_reports_deterministic(self, tmp_path):
        path = write(tmp_path, "six.txt", "n = 6\nM = 0,3\n")
        args = ("verify-independence", "--constraint", path, "--trials", "1500", "--seed", "11")
        assert run_cli(*args) == run_cli(*args)


class TestEnumerateAndCount:
    def test_enumerate_pinned_triples(self, tmp_path):
        path = write(tmp_path, "triples.txt", "n = 9\nM = 0,0,3\nC[3] = {1}\nC[3] = {8,9}\n")
        code, out = run_cli("enumerate", "--constraint", path)
        assert code == EXIT_OK
        assert "valid_groupings = 60" in out
        assert "fiber 1,4,6|2,5,7|3,8,9 = 4" in out
        assert len([line for line in out.splitlines() if line.startswith("fiber ")]) == 60

    def test_card_count(self, tmp_path):
        path = write(tmp_path, "eleven.txt", "n = 11\nM = 3,2,0,1\n")
        code, out = run_cli("card-count", "--constraint", path)
        assert code == EXIT_OK
        assert out.splitlines() == ["cards = 66", "max_group_size = 4", "bound_3dn = 132"]


def test_console_script_module(tmp_path):
    path = write(tmp_path, "pair.txt", "n = 2\nM = 0,1\n")
    proc = subprocess.run(
        [sys.executable, "-m", "cardgroup.cli", "run", "--constraint", path, "--seed", "4"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("Player 1: group {1,2}")


@pytest.mark.parametrize("argv", [[], ["--help"]])
def test_usage_exit_codes(argv):
    assert run_cli(*argv)[0] == (EXIT_OK if argv else EXIT_INPUT)
