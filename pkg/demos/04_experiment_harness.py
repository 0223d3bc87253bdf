"""A scaled-down pass through the experiment harness.

Runs a two-topology sweep and a miniature model comparison into
demos/out_demo/, with few seeds and iterations so it finishes in seconds.
The full-size equivalents are the `bornlab sweep` and `bornlab compare`
commands.
"""

from pathlib import Path

from bornlab.experiments import build_experiment_config, run_compare, run_sweep
from bornlab.models import qcbm_spec, qnbm_spec

out = Path(__file__).parent / "out_demo"

cfg = build_experiment_config({
    "out": str(out / "sweep"),
    "seeds": [0, 1, 2],
    "iterations": 40,
    "shots": "exact",
    "topologies": [[1, 0, 2], [2, 0, 2]],
})
rows, timings = run_sweep(cfg)
for row in rows:
    label = "qnbm_{n_in}_{n_hid}_{n_out}".format(**row)
    print(f"({row['n_in']},{row['n_hid']},{row['n_out']}): "
          f"KL {row['kl_mean']:.4f} +/- {row['kl_std']:.4f}, "
          f"precision {row['precision_mean']:.4f}  [{timings[label]:.1f}s]")

cfg = build_experiment_config({
    "out": str(out / "compare"),
    "seeds": [0, 1],
    "iterations": 40,
    "shots": "exact",
})
summary = run_compare(cfg, models=(qnbm_spec(4, 0, 5), qcbm_spec(5, 1)))
for target_label, models in summary["targets"].items():
    print(target_label)
    for label, m in models.items():
        print(f"  {label}: best KL {m['final_kl']:.4f}, "
              f"sampled precision {m['sampled_precision']:.4f}")

print(f"\nartifacts under {out}/")
for p in sorted(out.rglob("*")):
    if p.is_file():
        print(" ", p.relative_to(out))
