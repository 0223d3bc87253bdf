"""Train the smallest network on a one-hot target, exactly and from shots."""

from bornlab import TrainConfig, cardinality_target, qnbm_spec, train

spec = qnbm_spec(1, 0, 2)
target = cardinality_target(2, 1)  # uniform over {01, 10}

trace = train(spec, target, TrainConfig(max_iterations=200), seed=0)
print("exact-mode training, 200 iterations")
print("loss:", " -> ".join(f"{trace.loss_history[i]:.4f}" for i in [0, 10, 50, 199]))
print(f"final KL {trace.final_kl:.6f}, precision {trace.final_precision:.6f}")
print(f"acceptance at the end: {trace.acceptance_history[-1]:.4f}")
print()

trace = train(spec, target, TrainConfig(max_iterations=200, shots=10_000), seed=0)
print("same run trained from 10k-shot loss estimates")
print("loss:", " -> ".join(f"{trace.loss_history[i]:.4f}" for i in [0, 10, 50, 199]))
print(f"final KL {trace.final_kl:.6f}, precision {trace.final_precision:.6f}")
