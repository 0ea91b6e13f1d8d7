"""The bundled corpus."""

import pytest

from invwb import corpus
from invwb.errors import UnknownEntry
from invwb.mutation import target_loop
from invwb.program import ESSENTIAL


def test_twenty_entries():
    ids = corpus.ids()
    assert len(ids) == 20 and len(set(ids)) == 20


def test_designated_entries():
    assert sorted(e.id for e in corpus.designated()) == sorted([
        "gcd_subtraction", "gcd_division", "divided_diff", "max_one_way", "max_two_way",
        "has_sequential", "binary_search", "power_binary", "list_reversal", "bst"])


def test_deferred_entry_explains_itself():
    with pytest.raises(UnknownEntry, match="geometry"):
        corpus.get("rotating_calipers")


def test_unknown_entry():
    with pytest.raises(UnknownEntry):
        corpus.get("no_such_entry")


@pytest.mark.parametrize("entry_id", corpus.ids())
def test_entry_is_complete(entry_id):
    e = corpus.get(entry_id)
    assert e.routine.name == e.infer
    for name in e.routines:
        assert e.policy(name)
    lp = target_loop(e.routine)
    assert lp.variant is not None
    assert any(c.tag == ESSENTIAL for c in lp.invariant)


def test_alternative_corpus_dir(tmp_path, monkeypatch):
    import json
    import shutil
    src = corpus.corpus_dir()
    shutil.copy(src / "divided_diff.inv", tmp_path / "divided_diff.inv")
    index = json.loads((src / "index.json").read_text())
    index["entries"] = [m for m in index["entries"] if m["id"] == "divided_diff"]
    (tmp_path / "index.json").write_text(json.dumps(index))
    monkeypatch.setenv("INVWB_CORPUS_DIR", str(tmp_path))
    assert corpus.ids() == ["divided_diff"]
