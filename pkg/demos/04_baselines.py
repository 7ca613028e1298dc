"""
Two baselines: no delays, and classic FMEA
==========================================

Dropping the time delays gives plain synchronous FCM iteration.  FMEA
ignores dynamics altogether and scores each risk from its own indices
plus the direct influence of its causes.
"""

# %%
from tokenfcm import analysis, cases
from tokenfcm.cli import delay_comparison
from tokenfcm.engine import simulate
from tokenfcm.reporting import join_blocks, render_comparison_block, render_fmea_block

doc = cases.diesel()
labels = {n.id: n.label for n in doc.nodes}

# %%
comparison = delay_comparison(doc, doc.config(), 1e-6, 20)
print(join_blocks(render_comparison_block(comparison)))

# %%
# In this model the delays change the path but not the destination.
# Shorten the horizon to see the two transients part ways.
short = doc.config(horizon=8)
model = doc.to_model()
print("tokens,      minute 8:", simulate(model, config=short).final.round(4).tolist())
print("synchronous, minute 8:", analysis.classic_fcm_iterate(model, None, short).final.round(4).tolist())

# %%
entries, influences = doc.fmea_inputs()
rows, groups = analysis.fmea_hazards(entries, influences)
print(join_blocks(render_fmea_block(rows, groups, labels, {n.id: n.name for n in doc.nodes})))
