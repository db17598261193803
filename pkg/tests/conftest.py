import itertools
from collections import OrderedDict

import numpy as np
import pytest

from dirichlet_yang import sweep
from dirichlet_yang.cayley import GroupSpec, box, parse_group

# criterion number -> (title, [outcomes])
_CRITERIA = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _CRITERIA.setdefault(number, (title, []))
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        entry[1].append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, outcomes = _CRITERIA[number]
        ok = bool(outcomes) and all(o == "passed" for o in outcomes)
        terminalreporter.write_line(
            f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({outcomes.count('passed')}/{len(outcomes)} tests)")


# -- shared structured instances -------------------------------------------

PM2_MEASURE = [["s1", 0.25], ["s1^-1", 0.25], ["s1^2", 0.25], ["s1^-2", 0.25]]


def zn1_pm2():
    return GroupSpec.from_words("zn", 1, PM2_MEASURE)


def random_box_subsets(count=20, side=6, seed=2024):
    rng = np.random.default_rng(seed)
    cells = box(2, side)
    out = []
    for _ in range(count):
        size = int(rng.integers(2, len(cells) + 1))
        pick = np.sort(rng.choice(len(cells), size=size, replace=False))
        out.append([cells[t] for t in pick])
    return out


@pytest.fixture(scope="session")
def tree_instances():
    return {(d, r): sweep.group_instance(parse_group(f"tree:{d}"), r)
            for d, r in itertools.product((3, 4, 5), (1, 2, 3, 4))}


@pytest.fixture(scope="session")
def zn1_intervals():
    spec = parse_group("zn:1")
    return {m: sweep.group_instance(spec, interior=box(1, m)) for m in range(2, 13)}


@pytest.fixture(scope="session")
def zn1_pm2_intervals():
    spec = zn1_pm2()
    return {m: sweep.group_instance(spec, interior=box(1, m), instance_id=f"z1pm2-n{m}") for m in range(2, 13)}


@pytest.fixture(scope="session")
def zn2_boxes():
    spec = parse_group("zn:2")
    return {s: sweep.group_instance(spec, interior=box(2, s)) for s in range(2, 7)}


@pytest.fixture(scope="session")
def zn2_subsets():
    spec = parse_group("zn:2")
    return [sweep.group_instance(spec, interior=cells, instance_id=f"z2-subset{t}")
            for t, cells in enumerate(random_box_subsets())]


@pytest.fixture(scope="session")
def heis_balls():
    spec = parse_group("heisenberg")
    return {r: sweep.group_instance(spec, r) for r in (1, 2, 3)}


@pytest.fixture(scope="session")
def abelian_instances(zn1_intervals, zn2_boxes, zn2_subsets, heis_balls):
    return [*zn1_intervals.values(), *zn2_boxes.values(), *zn2_subsets, *heis_balls.values()]


@pytest.fixture(scope="session")
def structured_instances(tree_instances, abelian_instances, zn1_pm2_intervals):
    return [*tree_instances.values(), *abelian_instances, *zn1_pm2_intervals.values()]
