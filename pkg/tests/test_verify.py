import pytest

from darkstates import verify


def test_all_checks_pass():
    results = verify.run_checks(6)
    assert [name for name, _, _ in results] == [name for name, _ in verify.CHECKS]
    assert all(ok for _, ok, _ in results)


def test_fail_fast_names_invariant(monkeypatch):
    monkeypatch.setattr(verify, "CHECKS", (("always_broken", lambda n: "boom"), ("never_run", None)))
    with pytest.raises(verify.VerificationError) as info:
        verify.run_checks(3)
    assert info.value.name == "always_broken" and "always_broken" in str(info.value)


def test_non_fail_fast_collects(monkeypatch):
    monkeypatch.setattr(verify, "CHECKS", (("a", lambda n: "bad"), ("b", lambda n: None)))
    assert verify.run_checks(3, fail_fast=False) == [("a", False, "bad"), ("b", True, "")]
