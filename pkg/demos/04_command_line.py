"""Drive the command line entry point on a generated price file."""

import pathlib
import tempfile

from corrnet.cli import main
from corrnet.synthetic import one_factor_returns, prices_from_returns, write_price_file

work = pathlib.Path(tempfile.mkdtemp())
src = work / "prices.csv"
with open(src, "w") as fh:
    write_price_file(prices_from_returns(one_factor_returns(6, 300, 0.5, seed=2)), fh)

# %% static analysis of the whole sample
main(["static", "--input", str(src), "--out", str(work / "static")])
print(sorted(p.name for p in (work / "static").iterdir()))
print((work / "static" / "mst.dot").read_text())

# %% rolling analysis, tree exported as an edge list
main(["rolling", "--input", str(src), "--out", str(work / "rolling"), "--window", "120", "--step", "20",
      "--graph-format", "edgelist"])
print((work / "rolling" / "mean_correlation.csv").read_text())

# %% a bad request reports through the exit code
print("exit code", main(["static", "--input", str(src), "--out", str(work / "x"), "--window", "5000"]))
