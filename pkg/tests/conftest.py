"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

_criteria = {}  # nodeid -> (number, title)


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _criteria[item.nodeid] = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    results = {}  # number -> [title, all_passed]
    for status in ("passed", "failed", "error", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            key = _criteria.get(getattr(rep, "nodeid", None))
            if key is None or (status == "passed" and rep.when != "call"):
                continue
            num, title = key
            entry = results.setdefault(num, [title, True])
            if status != "passed":
                entry[1] = False
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        title, ok = results[num]
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {title}")
