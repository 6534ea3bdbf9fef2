"""How well does the data-driven direction track the optimal one?

For the bivariate normal model the optimal direction has a closed-form
characterization, computed here by the oracle. We compare it with the
average estimated direction over a handful of replications.

    python3 demos/02_direction_search.py
"""
from simfdr.simlab import SimConfig, example1_models, replicate, theta0_oracle_normal

print(f"{'(mu1, mu2)':<12}{'theta0':>9}{'mean theta_hat':>16}{'se':>8}")
for mu in ((2, 1), (2, 2), (2, 3)):
    theta0 = theta0_oracle_normal(*example1_models(mu, 0.2), pi0=0.75, alpha_prime=0.05)
    cfg = SimConfig(example=1, mu=mu, pi0=0.75, alpha=0.05, procedures=("sim1",),
                    reps=20, master_seed=5, theta_points=51)
    summary = replicate(cfg)
    row = summary.table[0]
    print(f"{str(mu):<12}{theta0:>9.4f}{row['mean_theta_hat']:>16.4f}{row['se_theta_hat']:>8.4f}")
