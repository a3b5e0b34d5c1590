from __future__ import annotations

import os

import pytest

from qcss.bch import BchCode


def pytest_collection_modifyitems(config, items):
    if os.environ.get("QCSS_LONGRUN") == "1":
        return
    skip = pytest.mark.skip(reason="set QCSS_LONGRUN=1 to run the long statistical tier")
    for item in items:
        if "longrun" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def code_4_2() -> BchCode:
    return BchCode.from_params(4, 2)


@pytest.fixture(scope="session")
def code_6_2() -> BchCode:
    return BchCode.from_params(6, 2)


class _BuildCache:
    """Default-profile builds shared across test modules, keyed by (m, t, M_x, seed)."""

    def __init__(self):
        self._codes = {}

    def __call__(self, m: int, t: int, M_x: int, seed: int = 1):
        from qcss.css import build_css_code

        key = (m, t, M_x, seed)
        if key not in self._codes:
            self._codes[key] = build_css_code(BchCode.from_params(m, t), M_x, seed=seed)
        return self._codes[key]


@pytest.fixture(scope="session")
def built():
    return _BuildCache()


_CRITERIA: dict[str, tuple[bool, str]] = {}


class _Criterion:
    """Context manager recording a criterion's verdict for the terminal summary."""

    def __init__(self, key: str, title: str):
        self.key, self.title, self.detail = key, title, ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        detail = self.detail if ok or not exc else f"{self.detail} | {str(exc).splitlines()[0]}"
        _CRITERIA[self.key] = (ok, f"{self.title}: {detail}".rstrip(": "))
        return False


@pytest.fixture(scope="session")
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    def order(key: str):
        head = key.split("[")[0].split("-")[0]
        return (int(head), key)

    for key in sorted(_CRITERIA, key=order):
        ok, text = _CRITERIA[key]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {key} - {text}")
