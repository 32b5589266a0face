# # The command line, driven from Python
#
# Each call below is what `markovhull ...` does in a shell.

# %%
import tempfile
from pathlib import Path

from markovhull.cli import main

work = Path(tempfile.mkdtemp())
fixture = work / "eta.json"
main(["generate", "--kind", "correlated-pair", "--output", str(fixture)])
main(["markovianise", "--input", str(fixture), "--pins", "1", "--output", str(work / "m1.json")])

# %%
code = main([
    "hull", "--input", str(fixture), "--ordering", "sweep",
    "--trace", str(work / "trace.csv"), "--report", str(work / "report.json"),
    "--output", str(work / "limit.json"),
])
print("exit", code)
print((work / "trace.csv").read_text())

# %%
print("exit", main(["hull", "--input", str(fixture), "--max-steps", "0", "--output", str(work / "stuck.json")]))
main(["info", "--input", str(work / "limit.json")])
