"""Walk one player from serve statistics to prize money.

    python demos/one_player.py Federer
"""

import sys

from servesalience.bounds import classify_player, lemma2_geometry, optimality_bounds
from servesalience.counterfactual import counterfactual_report
from servesalience.fixtures import fixture_stats, us_open_2025_ladder
from servesalience.structural import fit_player

name = sys.argv[1] if len(sys.argv) > 1 else "Federer"
stats = fixture_stats()[name]
print(f"{name}: first serve in {stats.x1:.1%}, second serve in {stats.x2:.1%}")

# Model-free first: where can the salience weight sit at all?
b = optimality_bounds(stats)
geo = lemma2_geometry(stats)
print(f"delta must lie in [{b.lower:.3f}, {b.upper:.3f}]; "
      f"the violating sliver covers {geo.ratio:.1%} of the feasible triangle "
      f"-> {classify_player(stats).value}")

# Now the power-curve model, which pins the weight down exactly.
fit = fit_player(stats)
sk = fit.skills
print(f"curvature {sk.lam:.2f}, delta {fit.prefs.delta:+.3f}")
print(f"  one-shot win  f(x) = ({sk.a_f:.2f} - x^{sk.lam:.2f}) / {sk.tau_f:.2f}")
print(f"  multi-shot win k(x) = ({sk.a_k:.2f} - x^{sk.lam:.2f}) / {sk.tau_k:.2f}")

r = counterfactual_report(fit, us_open_2025_ladder())
print(f"serving to win points instead: first serve {r.delta_x1:+.2f} pt, second serve {r.delta_x2:+.2f} pt")
print(f"  point {r.delta_point:+.2f} pt, match {r.delta_match:+.2f} pt, prize ${r.delta_prize:,.0f}")
