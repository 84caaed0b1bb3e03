"""How much of the salience story survives other curve shapes and resampling?

    python demos/how_sure_are_we.py
"""

from servesalience.bootstrap import BootstrapConfig, structural_ci
from servesalience.fixtures import counts_from_stats, fixture_sizes, fixture_stats
from servesalience.robustness import curvature_t_fit, softmax_fit
from servesalience.structural import fit_player

stats, sizes = fixture_stats(), fixture_sizes()

print(f"{'player':<12} {'power':>7} {'softmax':>8} {'t=0.5':>7} {'t=2':>7}   95% interval")
for pid, s in stats.items():
    power = fit_player(s).prefs.delta
    soft = softmax_fit(s).delta
    lo_t, hi_t = curvature_t_fit(s, 0.5), curvature_t_fit(s, 2.0)
    cell = lambda c: f"{c.delta:7.2f}" if c.solved else "   n.a."
    ci = structural_ci(counts_from_stats(pid, s, sizes[pid]), BootstrapConfig(300, 0.95, 1), stats=s)[0]
    star = "*" if ci.significant else " "
    print(f"{pid:<12} {power:7.2f} {soft:8.2f} {cell(lo_t)} {cell(hi_t)}   [{ci.lo:.2f}, {ci.hi:.2f}]{star}")

print("\n* interval excludes zero")
