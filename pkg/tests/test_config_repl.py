from __future__ import annotations

import io
import json

import pytest

from cis.config import Config, load_config
from cis.repl import run_repl
from cis.store import InteractionStore

from conftest import TOY_CORPUS
from test_batch import write_corpus


def test_config_file_and_env_override(tmp_path):
    path = tmp_path / "cis.conf"
    path.write_text("# comment\ndispatch.timeout_ms = 700\nretrieval.k = 4\n")
    cfg = load_config(path, environ={"CIS_RETRIEVAL_K": "7"})
    assert cfg.dispatch_config().timeout_ms == 700
    assert cfg.retrieval_config().k == 7


def test_config_defaults():
    cfg = Config()
    assert cfg.dispatch_config().timeout_ms == 2000
    assert cfg.dispatch_config().selection_policy == "max_confidence"
    assert cfg.retrieval_config().rerank_depth == 20


def test_config_list_parsing():
    cfg = Config({"dispatch.priority": "qa, search"})
    assert cfg.dispatch_config().action_priority == ("qa", "search")


def test_malformed_config_line(tmp_path):
    path = tmp_path / "cis.conf"
    path.write_text("no equals sign here\n")
    with pytest.raises(ValueError):
        load_config(path)


@pytest.fixture
def corpus_file(tmp_path):
    path = tmp_path / "corpus.ndjson"
    write_corpus(path, TOY_CORPUS)
    return path


def _repl(corpus_file, tmp_path, input_text):
    stdout, stderr = io.StringIO(), io.StringIO()
    store = InteractionStore(tmp_path / "log")
    run_repl(corpus_file, Config(), store=store,
             stdin=io.StringIO(input_text), stdout=stdout, stderr=stderr)
    return stdout.getvalue(), stderr.getvalue(), store


def test_repl_dispatch_and_diagnostics(corpus_file, tmp_path):
    out, err, store = _repl(corpus_file, tmp_path,
                            "tell me about the parrot species\nwhere do they live\n\\quit\n")
    # responses on stdout only; diagnostics (incl. rewritten query) on stderr
    assert out.strip()
    assert "where do parrot species live" in err
    assert len(list(store.export_log())) == 4
    store.close()


def test_repl_empty_line_not_dispatched(corpus_file, tmp_path):
    _, _, store = _repl(corpus_file, tmp_path, "\n\n\\quit\n")
    assert list(store.export_log()) == []
    store.close()


def test_repl_log_command(corpus_file, tmp_path):
    _, err, store = _repl(corpus_file, tmp_path, "parrot species\n\\log 2\n\\quit\n")
    log_lines = [l.lstrip("> ") for l in err.splitlines() if '"seq"' in l]
    decoded = [json.loads(l) for l in log_lines]
    assert len(decoded) == 2
    store.close()


def test_repl_bad_command_prints_usage(corpus_file, tmp_path):
    _, err, store = _repl(corpus_file, tmp_path, "\\bogus\n\\quit\n")
    assert "commands:" in err
    store.close()
