import functools

import pytest

from synthgraph.taskgen import default_config, generate_task, make_splits


@functools.lru_cache(maxsize=None)
def cached_dataset(task, seed=0):
    return generate_task(task, default_config(task, seed=seed))


@functools.lru_cache(maxsize=None)
def cached_splits(task, seed=0):
    return make_splits(cached_dataset(task, seed), 10, seed)


@pytest.fixture(scope="session")
def dataset():
    return cached_dataset


@pytest.fixture(scope="session")
def splits():
    return cached_splits


def pytest_terminal_summary(terminalreporter):
    # one line per acceptance criterion; a criterion passes only if all its tests do
    results = {}
    for status in ("passed", "failed"):
        for rep in terminalreporter.stats.get(status, []):
            if rep.when != "call":
                continue
            for key, value in getattr(rep, "user_properties", []):
                if key == "criterion":
                    num, title = value
                    ok, _, count = results.get(num, (True, title, 0))
                    results[num] = (ok and rep.passed, title, count + 1)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            ok, title, count = results[num]
            terminalreporter.write_line(
                f"{'PASS' if ok else 'FAIL'}  criterion {num}: {title} ({count} checks)")
