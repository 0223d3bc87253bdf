"""Forward evaluation of the three model families.

Each model maps a flat parameter vector to a probability distribution over
output bitstrings. The network models also report the post-selection
acceptance probability (the chance that every ancilla measurement
succeeded).
"""

import numpy as np

from bornlab import linear_qnbm_spec, qcbm_spec, qnbm_spec


def show(dist, max_rows=8):
    n = dist.n_bits
    order = np.argsort(dist.probs)[::-1][:max_rows]
    for i in order:
        bar = "#" * int(round(40 * dist.probs[i]))
        print(f"  {i:0{n}b}  {dist.probs[i]:8.5f}  {bar}")


rng = np.random.default_rng(2024)

for spec in [qnbm_spec(2, 1, 3), linear_qnbm_spec(2, 1, 3), qcbm_spec(3, 2)]:
    params = spec.init_params(rng)
    dist, acceptance = spec.distribution(params)
    print(f"{spec.label}: {spec.param_count} parameters")
    if acceptance is not None:
        print(f"  acceptance probability {acceptance:.4f}")
    show(dist)
    print()

# At zero parameters every model is the point mass on the all-zero string:
# nothing rotates, nothing entangles.
for spec in [qnbm_spec(2, 1, 3), qcbm_spec(3, 2)]:
    dist, _ = spec.distribution(np.zeros(spec.param_count))
    print(f"{spec.label} at zero parameters: P(000) = {dist.probs[0]:.6f}")
