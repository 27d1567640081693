"""Shared helpers for the test suite."""

from fractions import Fraction


def load_csv(path):
    """Read one of our CSVs: returns (comment lines, list of row dicts)."""
    notes = []
    rows = []
    header = None
    for line in path.read_text().splitlines():
        if line.startswith("#"):
            notes.append(line[1:].strip())
        elif header is None:
            header = line.split(",")
        elif line:
            rows.append(dict(zip(header, line.split(","))))
    return notes, rows


def frac(text):
    """Parse '1/128' style labels to float."""
    return float(Fraction(text))
