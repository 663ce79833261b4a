"""A small version of the full comparison.

Every method sees the same test scenarios in each (mu, sigma) cell; the
table lists mean throughput, failure rate and online time.
"""

from udua.harness import ExperimentConfig, run_experiment

cfg = ExperimentConfig(cells=[(-1.0, 0.6), (-0.2, 1.0)], n_test=10)
metrics = run_experiment(cfg)

print(f"{'method':<14}{'mu':>6}{'sigma':>7}{'Mbps':>10}{'fail':>7}{'ms':>9}")
for r in metrics.rows:
    print(f"{r.method:<14}{r.mu:>6}{r.sigma:>7}{r.mean_throughput_bps / 1e6:>10.3f}{r.failure_rate:>7.2f}{r.mean_time_ms:>9.3f}")
