"""
Watching tokens move
====================

Three concepts: C2 influences C1, and C1 influences C3, each after a
five minute delay.  Only C2 holds a token when the clock starts.
"""

# %%
from tokenfcm.engine import SimulationConfig, TokenEngine
from tokenfcm.model import CausalArc, RiskModel, RiskNode

model = RiskModel(
    (RiskNode(1, "C1", 0.5), RiskNode(2, "C2", 0.6), RiskNode(3, "C3", 0.7)),
    (CausalArc(2, 1, 0.4, 5), CausalArc(1, 3, 0.6, 5)),
)
# A one-minute step keeps each token in flight for five steps.
engine = TokenEngine(model, config=SimulationConfig(step=1, horizon=11), active={2})

# %%
# Step the engine by hand and print what is in flight after each step.
for _ in range(11):
    updated = engine.step()
    print(f"t={engine.time:>4g}  updated={sorted(updated)}  values={engine.values.round(4).tolist()}")
    for tok in engine.tokens:
        print(f"        token {tok.token_id}: from C{tok.node_id} carrying {tok.node_value:.4f}"
              f" -> C{tok.target} in {tok.remaining_steps} step(s)")

# %%
# C1 reaches 0.677 at minute 5 and C3 reaches 0.7514 at minute 10.
# C3 has no outgoing arcs, so the last token is absorbed there.
