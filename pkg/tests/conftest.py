import pytest
from hypothesis import settings

from shoprepair.instances import DEMO_5X3_SCHEDULE, load_instance

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def demo():
    return load_instance("demo:5x3")


@pytest.fixture
def ref_schedule():
    return DEMO_5X3_SCHEDULE


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
