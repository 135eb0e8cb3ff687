"""
Driving the command line tool
=============================

Everything above is also available from ``subcell`` (or ``python -m subcell``).
This script calls the same entry point in-process.
"""
import tempfile
from pathlib import Path

from subcell.cli import main

work = Path(tempfile.mkdtemp())
grid = work / "circle.txt"

main(["rasterize", "--shape", "circle", "--l", "24", "--out", str(grid)])
print(grid.read_text().splitlines()[0])

main(["reconstruct", "--grid", str(grid), "--method", "elvira", "--out", str(work / "rec")])
main(["converge", "--method", "elvira,quadratic-aero", "--resolutions", "10,20,30,40",
      "--out", str(work / "rates.csv")])
print((work / "rates.csv").read_text())

# shapes can be given inline as JSON
code = main(["rasterize", "--shape", '{"circle": {"center": [0.5, 0.5], "r": 0.2}}', "--l", "8"])
print("exit code", code)
