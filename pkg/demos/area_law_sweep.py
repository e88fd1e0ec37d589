"""
Area law for the product bound
==============================

Disorder-averaged product bound divided by ``(2N + 1) |boundary|`` for half
chains of growing length.  A flat table means the bound depends on the cut,
not on the volume.  Output files land next to this script in ``out/``.
"""

# %%
# Run the configured sweep
# ------------------------

import json
from pathlib import Path

from oscneg.experiments import run

here = Path(__file__).resolve().parent
config = json.loads((here / "configs" / "area_law.json").read_text())
config["output"] = str(here / "out" / "area_law")
code, artifacts = run(config)
print("exit code", code)
print("wrote", artifacts["csv"])

# %%
# Ratio table
# -----------

table = {}
for p in artifacts["summary"]["points"]:
    if p["value_kind"] == "product_bound":
        table.setdefault(p["volume"], {})[p["N"]] = p["ratio"]
Ns = sorted(next(iter(table.values())))
print("\n|L| " + "".join(f"{'N=' + str(N):>10}" for N in Ns))
for vol in sorted(table):
    print(f"{vol:>3} " + "".join(f"{table[vol][N]:10.5f}" for N in Ns))
print("\nrelative spread:", f"{artifacts['summary']['product_ratio_variation']:.1%}")
