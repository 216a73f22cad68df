import time

import pytest

from pseudorot.arc_finder import find_arc
from pseudorot.band_maps import make_map
from pseudorot.farey import make_farey

ACCEPTANCE_LINES: list[str] = []

DESK_MAPS = {
    "rotation_0.63": ("rotation", {"alpha": 0.63}),
    "linear_twist": ("linear_twist", {"alpha": 0.615, "beta": 0.04}),
    "perturbed_twist": ("perturbed_twist", {"alpha": 0.62, "beta": 0.02, "eps_p": 0.01}),
}


@pytest.fixture(scope="session")
def interval_35_23():
    return make_farey(3, 5, 2, 3)


@pytest.fixture(scope="session")
def desk_certificates(interval_35_23):
    """Certificates for the three desk-scale maps, with wall-clock times."""
    out = {}
    for name, (family, params) in DESK_MAPS.items():
        h = make_map(family, params)
        start = time.perf_counter()
        cert = find_arc(h, interval_35_23)
        out[name] = (h, cert, time.perf_counter() - start)
    return out


@pytest.fixture
def record_criterion():
    def record(label, title: str, ok: bool, detail: str = "") -> None:
        name = f"criterion {label}" if isinstance(label, int) else label
        line = f"{name} {'PASS' if ok else 'FAIL'}: {title}"
        if detail:
            line += f" ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        def order(line):
            parts = line.split()
            return (0, int(parts[1])) if parts[0] == "criterion" else (1, 0)

        for line in sorted(ACCEPTANCE_LINES, key=order):
            terminalreporter.write_line(line)
