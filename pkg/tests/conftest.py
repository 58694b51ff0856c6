from __future__ import annotations

import pytest

from concentric.core import h7_family
from concentric.instances import tc7


@pytest.fixture(scope="session")
def tc7_p():
    return tc7()


@pytest.fixture(scope="session")
def h7m9():
    return h7_family(9)


@pytest.fixture(scope="session")
def h7m9_certificate(h7m9):
    from concentric.cli import RunConfig, cmd_search

    code, doc = cmd_search(h7m9, RunConfig("search"))
    assert code == 0, doc.get("reason")
    return doc
