"""
Iteration history files and the live summary table
===================================================

Every run can append its iterations to a save file (JSON Lines, one
self-describing record per line, flushed record-by-record so another
process can follow the run live).  A fixed-width summary table tracks the
scalar state of each major iteration.  Save files feed post-processing,
plotting, and the warm/hot restarts shown in the next demo.
"""

from pathlib import Path

import numpy as np

from sqpkit import SaveConfig, SolverOptions, get_problem, load_history, optimize

out = Path("demo_output")
out.mkdir(exist_ok=True)
save_path = out / "example2d.slsqp.jsonl"
summary_path = out / "example2d_summary.out"

# save_itr="all" stores one record per function evaluation on top of the
# per-major-iteration records; save_vars picks what the major records carry.
save = SaveConfig(
    path=str(save_path),
    save_itr="all",
    save_vars=("majiter", "x", "objective", "constraints", "gradient",
               "jacobian", "multipliers", "optimality", "feasibility", "step",
               "nfev", "ngev"),
)

spec = get_problem("example2d").spec_factory()
results = optimize(spec, SolverOptions(save=save, summary_path=str(summary_path)))
print(f"run finished: {results.status.value} after {results.num_majiter} major iterations\n")

# --- read the save file back ----------------------------------------------
history = load_history(str(save_path))
print(f"header: n={history.header['n']} m={history.header['m']} meq={history.header['meq']}")
print(f"records: {len(history.major_records)} major + {len(history.eval_records)} eval\n")

print("objective trajectory (unscaled):")
for rec in history.major_records:
    p = rec.payload
    print(f"  iter {p['majiter']}: f={p['objective']:12.8f}  x={np.round(p['x'], 8)}"
          f"  feas={p['feasibility']:.2e}")

# Values round-trip bit-exactly through the decimal encoding:
assert history.major_records[-1].payload["objective"] == results.f_star

# --- the summary table -----------------------------------------------------
print("\nsummary table (" + str(summary_path) + "):")
print(summary_path.read_text(), end="")

# The same file can be inspected from the shell:
#   sqpkit inspect --file demo_output/example2d.slsqp.jsonl
