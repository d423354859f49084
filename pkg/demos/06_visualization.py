"""
Plotting optimization progress
==============================

Two ways to get charts:

* after the fact, from any save file (``render_series`` or the
  ``sqpkit plot`` subcommand);
* live, by re-rendering an image after every major iteration.  Rendering
  runs on a worker thread behind an ordered queue, so a slow disk never
  stalls the solver; open the file in any auto-reloading viewer to watch
  a long run converge.
"""

from pathlib import Path

from sqpkit import (
    SaveConfig,
    SolverOptions,
    VizConfig,
    get_problem,
    load_history,
    optimize,
    render_series,
)

out = Path("demo_output")
out.mkdir(exist_ok=True)

# --- record a run, then chart it -------------------------------------------
save_path = out / "rosenbrock.slsqp.jsonl"
spec = get_problem("rosenbrock2d-con").spec_factory()
optimize(spec, SolverOptions(summary_path="", save=SaveConfig(path=str(save_path))))

history = load_history(str(save_path))
image = render_series(history, VizConfig(
    vars=("objective", "optimality", "feasibility", "x[0]"),
    out_path=str(out / "rosenbrock_series.png")))
print(f"wrote {image}: one panel per series, x-axis = major iteration")

# Selectors are scalar names or indexed vector entries ("x[0]",
# "constraints[1]", "multipliers[0]"). The same chart from the shell:
#   sqpkit plot --file demo_output/rosenbrock.slsqp.jsonl \
#               --vars objective,feasibility --out progress.png

# --- live rendering during a solve ------------------------------------------
live_path = out / "dblint_live.png"
viz = VizConfig(vars=("objective", "feasibility"), out_path=str(live_path),
                refresh="every_major")
results = optimize(get_problem("dblint-20").spec_factory(),
                   SolverOptions(summary_path="", visualize=viz))
print(f"wrote {live_path} (re-rendered as iterations arrived; "
      f"final image covers all {results.num_majiter} iterations)")
