from cheegerkit.verify import CHECKS, MANIFEST, SUITES, manifest_problems, run


def test_manifest_complete():
    assert manifest_problems() == []


def test_every_suite_has_checks():
    for suite in SUITES:
        assert any(s == suite for s, _ in CHECKS.values()), suite


def test_run_single_check():
    results = run(only=["surgery.presentation_roundtrip"])
    assert len(results) == 1 and results[0].ok
    assert results[0].to_json()["id"] == "surgery.presentation_roundtrip"


def test_manifest_entries_are_unique():
    ids = [inv.check for inv in MANIFEST]
    assert len(ids) == len(set(ids))
