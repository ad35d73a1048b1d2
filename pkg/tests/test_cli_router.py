"""
Unit tests for the command-line router.

Tests argument parsing, configuration, report output and exit codes through
main().
"""

import json
import logging
from unittest.mock import patch

import pytest

from app.main import main
from app.routers.cli_router import log_level, parse, run_config
from app.schemas.reports import CompileReport, EntailReport, RankReport, SolveReport


@pytest.fixture(autouse=True)
def memory_cache():
    """Keep every CLI run on the in-memory verdict cache."""
    with patch.dict('os.environ', {'DDL_CACHE_BACKEND': 'memory'}):
        yield


def test_rank_text(capsys, fixtures_dir):
    """Test the text rank report."""
    code = main(["rank", str(fixtures_dir / "exa.kb")])

    assert code == 0
    out = capsys.readouterr().out
    assert "rank 1: BigFeline ~[= !Docile" in out
    assert "exceptionality: E_0=3, E_1=1" in out


def test_rank_json(capsys, fixtures_dir):
    """Test the JSON rank report with the format option before the command."""
    code = main(["--format", "json", "rank", str(fixtures_dir / "exb.kb")])

    assert code == 0
    report = json.loads(capsys.readouterr().out)
    assert len(report["axioms"]) == 5
    assert report["exceptionality_sizes"] == [5, 2]


def test_compile_output_file(capsys, fixtures_dir, tmp_path):
    """Test that -o writes the report to a file."""
    target = tmp_path / "exb.dlp"
    code = main(["compile", str(fixtures_dir / "exb.kb"), "-o", str(target)])

    assert code == 0
    assert capsys.readouterr().out == ""
    lines = target.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("lambda = {")
    assert len(lines) == 12


def test_solve(capsys, fixtures_dir):
    """Test listing answer sets."""
    code = main(["solve", str(fixtures_dir / "two_answer_sets.kb")])

    assert code == 0
    assert capsys.readouterr().out == "{c(a), -c(b)}\n{-c(a), c(b)}\n"


def test_solve_query_exit_codes(capsys, fixtures_dir):
    """Test yes and no answers of consequence queries."""
    path = str(fixtures_dir / "two_answer_sets.kb")
    assert main(["solve", path, "--query", "c(a)", "--mode", "brave"]) == 0
    assert main(["solve", path, "--query", "c(a)", "--mode", "cautious"]) == 1
    assert capsys.readouterr().out == "yes\nno\n"


def test_entail(capsys, fixtures_dir):
    """Test a defeasible entailment query."""
    code = main(["entail", str(fixtures_dir / "exa.kb"), "--query", "Cat ~[= !Big"])

    assert code == 0
    assert capsys.readouterr().out == "yes\n"


def test_entail_requires_query(capsys, fixtures_dir):
    """Test that argparse rejects entail without --query."""
    assert main(["entail", str(fixtures_dir / "exa.kb")]) == 2


def test_missing_command():
    """Test that a command is required."""
    assert main([]) == 2


def test_missing_file(capsys, tmp_path):
    """Test that a missing input file exits with 2."""
    code = main(["rank", str(tmp_path / "missing.kb")])

    assert code == 2
    assert capsys.readouterr().out.startswith("error: ")


def test_invalid_cases(capsys):
    """Test that --cases 0 fails validation."""
    assert main(["check-postulates", "--cases", "0"]) == 2
    assert "invalid options" in capsys.readouterr().err


def test_check_postulates(capsys):
    """Test a short postulate run."""
    code = main(["check-postulates", "--seed", "1", "--cases", "3"])

    assert code == 0
    assert "all postulates hold" in capsys.readouterr().out


def test_run_config_env_fallback():
    """Test that the oracle command and timeout come from the environment."""
    with patch.dict('os.environ', {'DDL_ORACLE': 'reasoner --stdin', 'DDL_TIMEOUT': '5'}):
        cfg = run_config(parse(["rank", "kb.kb"]))

    assert cfg.oracle == "reasoner --stdin"
    assert cfg.timeout == 5.0


def test_run_config_flags_win():
    """Test that flags override the environment."""
    with patch.dict('os.environ', {'DDL_ORACLE': 'reasoner', 'DDL_TIMEOUT': '5'}):
        cfg = run_config(parse(["rank", "kb.kb", "--oracle", "other", "--timeout", "2"]))

    assert cfg.oracle == "other"
    assert cfg.timeout == 2.0


def test_log_level():
    """Test the verbosity flags."""
    assert log_level(parse(["--debug", "rank", "kb.kb"])) == logging.DEBUG
    assert log_level(parse(["rank", "kb.kb", "-v"])) == logging.INFO
    with patch.dict('os.environ', {'DDL_LOG_LEVEL': 'error'}):
        assert log_level(parse(["rank", "kb.kb"])) == logging.ERROR


@pytest.mark.parametrize("argv, report_model", [
    (["rank", "exb.kb"], RankReport),
    (["compile", "exb.kb"], CompileReport),
    (["solve", "two_answer_sets.kb"], SolveReport),
    (["solve", "two_answer_sets.kb", "--query", "c(a)", "--mode", "brave"], SolveReport),
    (["entail", "exa.kb", "--query", "Tiger ~[= !Docile"], EntailReport),
])
def test_json_and_text_agree(capsys, fixtures_dir, argv, report_model):
    """Test that the JSON report renders to exactly the text report."""
    command, name, *rest = argv
    args = [command, str(fixtures_dir / name), *rest]

    assert main(args) in (0, 1)
    text = capsys.readouterr().out
    assert main(["--format", "json", *args]) in (0, 1)
    report = report_model.model_validate_json(capsys.readouterr().out)

    assert report.to_text().rstrip("\n") == text.rstrip("\n")


def test_solve_unknown_literal_exit_code(capsys, fixtures_dir):
    """Test that querying a literal outside the Herbrand base is an error."""
    code = main(["solve", str(fixtures_dir / "two_answer_sets.kb"), "--query", "d(a)"])

    assert code == 2
    out = capsys.readouterr().out
    assert out.startswith("error: ")
    assert "Herbrand base" in out
