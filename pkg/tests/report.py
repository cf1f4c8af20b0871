"""Collects one verdict line per acceptance criterion for the terminal summary."""
LINES = {}


def record(number: int, ok: bool, detail: str):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    LINES[number] = line
    print(line)
    return ok
