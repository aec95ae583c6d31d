def pytest_terminal_summary(terminalreporter):
    """Echo the one-line verdicts printed by the acceptance tests."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when == "call" and "test_acceptance.py" in rep.nodeid:
                lines += [ln for ln in rep.capstdout.splitlines() if ln.startswith(("[PASS]", "[FAIL]"))]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
