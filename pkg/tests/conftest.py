"""Shared pytest wiring: a per-criterion pass/fail summary for the
acceptance module, printed at the end of every run that touched it."""

CRITERIA = {
    "test_criterion_01": "exact-solution certificate (20 instances, N=12)",
    "test_criterion_02": "locality scan: max kernel-support window <= 7 < N",
    "test_criterion_03": "injectivity length equals 7 on >= 80% of draws",
    "test_criterion_04": "spectrum: unique gapped ground state at N=12",
    "test_criterion_05": "MPS reduced densities match statevector traces",
    "test_criterion_06": "parameter-shift gradient matches finite differences",
    "test_criterion_07": "optimizer success threshold vs start distance (N=10)",
    "test_criterion_08": "trivial zero-angle instance closed form",
    "test_criterion_09": "optimizer sanity: Rosenbrock and quadratics",
    "test_criterion_10": "byte-identical records.csv on repeated runs",
}


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" not in nodeid:
                continue
            for key in CRITERIA:
                if key in nodeid:
                    verdict = "PASS" if status == "passed" else "FAIL"
                    outcomes[key] = verdict
    if not outcomes:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(CRITERIA):
        if key in outcomes:
            line = f"{outcomes[key]:4s}  {key[-2:]}: {CRITERIA[key]}"
            terminalreporter.write_line(line)
