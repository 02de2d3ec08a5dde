"""Acceptance suite: one PASS/FAIL line per criterion.

The lines are written straight to the terminal, so they appear in a plain
``pytest`` run.  ``python tests/test_acceptance.py`` prints them without pytest.
"""

import pytest

import acceptance

pytestmark = pytest.mark.acceptance


def _show(capsys, line):
    with capsys.disabled():
        print("\n" + line, flush=True)


@pytest.mark.parametrize("c", sorted(acceptance.CRITERIA))
def test_criterion(c, capsys):
    ok, line = acceptance.criterion_line(c)
    _show(capsys, line)
    assert ok, line


def test_product_field_coherence(capsys):
    ok, line = acceptance.coherence_line()
    _show(capsys, line)
    assert ok, line


def test_codec(capsys):
    ok, line = acceptance.codec_line()
    _show(capsys, line)
    assert ok, line


if __name__ == "__main__":
    import sys
    results = []
    for c in sorted(acceptance.CRITERIA):
        results.append(acceptance.criterion_line(c))
        print(results[-1][1], flush=True)
    for fn in (acceptance.coherence_line, acceptance.codec_line):
        results.append(fn())
        print(results[-1][1], flush=True)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
