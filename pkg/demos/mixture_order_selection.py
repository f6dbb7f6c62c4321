"""Order selection for a bivariate normal mixture, end to end.

Draws one sample from the four-component benchmark scenario S1.2, fits
mixtures of order 1..8 by EM, and shows how each criterion penalizes
the fitted risk profile and which order it selects.
"""

import numpy as np

from riskselect.gmm import EmConfig, fit_em
from riskselect.selection import select, sweep
from riskselect.sim import sample_scenario, scenario, standard_criteria
from riskselect.streams import Stream

cfg = scenario("S1.2")
n = 2000
data = sample_scenario(cfg, n, Stream("demo-mixture", 0))
print(f"scenario {cfg.id}: {cfg.true_k} well-separated components, "
      f"n = {n}, orders 1..{cfg.m}")

em = EmConfig(restarts=10, seed=42)
profile = sweep(lambda x, k: fit_em(x, k, em)[1], data, cfg.m)

print()
print("minimized average negative log-likelihood per order")
for k, risk in enumerate(profile.min_risks, start=1):
    spread = float(np.ptp(profile.min_risks)) + 1e-12
    bar = "#" * int(60 * (risk - profile.min_risks.min()) / spread)
    print(f"  k={k}: {risk:.5f} {bar}")
print("the profile drops sharply until the true order and then flattens;")
print("selection is about pricing that flat tail.")

print()
print(f"{'criterion':>16} {'chosen k':>9}   penalized scores")
for crit in standard_criteria(cfg):
    result = select(profile, crit.spec)
    scores = " ".join(f"{s:.4f}" for s in result.scores)
    marker = "   <- true order" if result.chosen_k == cfg.true_k else ""
    print(f"{crit.label:>16} {result.chosen_k:>9}   {scores}{marker}")
