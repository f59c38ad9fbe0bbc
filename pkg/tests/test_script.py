import io
import os
import subprocess
import sys

import pytest

from dgdeform.cli import main
from dgdeform.expr import ParseError
from dgdeform.script import ScriptError, ScriptNameError, parse, run_script
from dgdeform.suites import DEMOS, demo_text


class TestParsing:
    def test_statements(self):
        stmts = parse("# comment\nuse derham 2\n\nlet a = t1*dt2 + h\nshow a & a  # trailing\n")
        assert [s.kind for s in stmts] == ["use", "let", "show"]
        assert [s.line for s in stmts] == [2, 4, 5]

    def test_parse_error_location(self):
        with pytest.raises(ParseError) as exc:
            run_script("use derham 1\nshow t +\n")
        assert (exc.value.line, exc.value.col) == (2, 9)
        with pytest.raises(ParseError) as exc:
            run_script("frobnicate\n")
        assert (exc.value.line, exc.value.col) == (1, 1)

    def test_undefined_name(self):
        with pytest.raises(ScriptNameError) as exc:
            run_script("use derham 1\nshow zz\n")
        assert (exc.value.line, exc.value.col) == (2, 6)
        assert "zz" in str(exc.value)

    def test_bad_instance(self):
        with pytest.raises(ScriptError, match="unknown catalog instance"):
            run_script("use nope\n")
        with pytest.raises(ScriptError, match="outside"):
            run_script("use derham n=9\n")


class TestExecution:
    def test_canonical_show(self):
        out, failures = run_script("use derham 1\nshow t * dt\nshow (1+i)*h^2*t - 3/2\nshow t & t\n")
        assert out == "t*dt\n-3/2 + (1+i)*h^2*t\nt^2\n" and failures == 0

    def test_deformed_square(self):
        out, _ = run_script("use derham 2\nshow t1 & t1\nshow t1 & t2 - t1*t2\n")
        # t1 *d t2 - t1 t2 = i h dt1 dt2
        assert out.splitlines()[1] == "i*h*dt1*dt2"

    def test_deterministic(self):
        text = demo_text("dga_demo", "dg")
        assert run_script(text) == run_script(text)

    def test_failed_check_is_counted(self):
        out, failures = run_script("use derham 2\ncheck s-equiv t1 t2\n")
        assert failures == 1 and "FAIL" in out
        out, failures = run_script("use derham 2\nset lambda -ih\ncheck s-equiv t1 t2\n")
        assert failures == 0

    @pytest.mark.parametrize("name", DEMOS)
    def test_golden(self, name):
        out, failures = run_script(demo_text(name, "dg"))
        assert failures == 0
        assert out == demo_text(name, "out")


class TestCli:
    def run(self, capsys, *argv):
        code = main(list(argv))
        cap = capsys.readouterr()
        return code, cap.out, cap.err

    def test_run(self, tmp_path, capsys):
        good = tmp_path / "good.dg"
        good.write_text("use derham 1\ncheck assoc deformed t t dt\n")
        assert self.run(capsys, "run", str(good))[0] == 0
        bad = tmp_path / "bad.dg"
        bad.write_text("use derham 2\ncheck s-equiv t1 t2\n")
        assert self.run(capsys, "run", str(bad))[0] == 1
        broken = tmp_path / "broken.dg"
        broken.write_text("use derham 1\nshow t +\n")
        code, _, err = self.run(capsys, "run", str(broken))
        assert code == 2 and "line 2, col 9" in err
        assert self.run(capsys, "run", str(tmp_path / "missing.dg"))[0] == 2

    def test_repl(self, monkeypatch, capsys):
        monkeypatch.setattr(sys, "stdin", io.StringIO("use derham 1\nshow zz\nshow t*t\nquit\nshow t\n"))
        code, out, err = self.run(capsys, "repl", "-q")
        assert code == 0
        assert out == "t^2\n" and "undefined name 'zz'" in err

    def test_suite(self, capsys):
        code, out, _ = self.run(capsys, "suite", "weak-pauli", "--trials", "3", "--seed", "5")
        assert code == 0 and out.startswith("PASS weak-pauli")
        code, out, _ = self.run(capsys, "suite", "s-equivalence", "--trials", "20", "--seed", "1", "--show", "1")
        assert code == 1 and "reproduce with:" in out
        code, _, err = self.run(capsys, "suite", "nope")
        assert code == 2 and "unknown suite" in err

    def test_module_entry_point(self, tmp_path):
        script = tmp_path / "s.dg"
        script.write_text("use derham 1\nshow t & t\n")
        res = subprocess.run([sys.executable, "-m", "dgdeform", "run", str(script)],
                             capture_output=True, text=True, env=dict(os.environ))
        assert res.returncode == 0 and res.stdout == "t^2\n"
