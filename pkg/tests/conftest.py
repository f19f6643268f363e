import sys

import pytest


@pytest.fixture
def announce(capsys):
    """Print one PASS/FAIL line past pytest's capture, then assert."""
    def _announce(label, ok, detail=""):
        with capsys.disabled():
            sys.stdout.write(f"\n{'PASS' if ok else 'FAIL'} {label}: {detail}\n")
        assert ok, f"{label}: {detail}"
    return _announce
