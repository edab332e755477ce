"""Shared test helpers: random label generation and hypothesis strategies."""

from __future__ import annotations

import random
import re

from hypothesis import strategies as st

from szfreq import (
    Cluster,
    Exact,
    FrequencyLabel,
    Multiple,
    NoSeizureReference,
    Range,
    Rate,
    SeizureFree,
    TimeUnit,
    Unknown,
    UnknownCluster,
)

# Values that survive the text round trip exactly: integers and short
# decimals have exact repr-based formatting.
_NICE_VALUES = (
    [float(n) for n in range(1, 31)]
    + [0.25, 0.5, 0.75, 1.5, 2.5, 12.0, 90.0, 365.0, 999.0, 1000.0, 0.1, 0.083]
)


def random_quantity(rng: random.Random):
    kind = rng.randrange(3)
    if kind == 0:
        return Exact(rng.choice(_NICE_VALUES))
    if kind == 1:
        lo = rng.choice(_NICE_VALUES)
        hi = rng.choice([v for v in _NICE_VALUES if v > lo] or [lo + 1.0])
        return Range(lo, hi)
    return Multiple()


def random_label(rng: random.Random) -> FrequencyLabel:
    """One label drawn across all six surface forms."""
    form = rng.randrange(6)
    unit = rng.choice(list(TimeUnit))
    if form == 0:
        return Unknown()
    if form == 1:
        return NoSeizureReference()
    if form == 2:
        return SeizureFree(
            random_quantity(rng), rng.choice([TimeUnit.MONTH, TimeUnit.YEAR])
        )
    if form == 3:
        return Rate(random_quantity(rng), random_quantity(rng), unit)
    if form == 4:
        return Cluster(
            random_quantity(rng), random_quantity(rng), unit, random_quantity(rng)
        )
    return UnknownCluster(random_quantity(rng))


def random_labels(seed: int, count: int) -> list[FrequencyLabel]:
    rng = random.Random(seed)
    return [random_label(rng) for _ in range(count)]


# hypothesis strategies mirroring the same shapes

_values = st.sampled_from(_NICE_VALUES)
quantities = st.one_of(
    _values.map(Exact),
    st.tuples(_values, _values)
    .filter(lambda t: t[0] < t[1])
    .map(lambda t: Range(*t)),
    st.just(Multiple()),
)
units = st.sampled_from(list(TimeUnit))
free_units = st.sampled_from([TimeUnit.MONTH, TimeUnit.YEAR])

labels = st.one_of(
    st.just(Unknown()),
    st.just(NoSeizureReference()),
    st.builds(SeizureFree, quantities, free_units),
    st.builds(Rate, quantities, quantities, units),
    st.builds(Cluster, quantities, quantities, units, quantities),
    st.builds(UnknownCluster, quantities),
)


# One verdict line per acceptance criterion at the end of the run.

_CRITERION_RE = re.compile(r"test_acceptance\.py::test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    verdicts: dict[int, str] = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            match = _CRITERION_RE.search(report.nodeid)
            if match and getattr(report, "when", "call") == "call":
                verdicts[int(match.group(1))] = "PASS" if report.passed else "FAIL"
    if not verdicts:
        return
    try:
        import test_acceptance

        details = test_acceptance.RESULT_DETAILS
        descriptions = test_acceptance.CRITERIA
    except ImportError:
        details, descriptions = {}, {}
    terminalreporter.write_sep("-", "acceptance criteria")
    for number in sorted(verdicts):
        text = details.get(number) or descriptions.get(number, "")
        terminalreporter.write_line(f"[criterion {number}] {verdicts[number]} - {text}")
