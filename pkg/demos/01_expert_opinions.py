"""
From expert head-counts to an initial risk value
================================================

Twenty experts grade each failure mode on occurrence, severity and
detection difficulty using five grades.  We turn the head-counts into
probabilistic term sets, combine them with importance weights, and
collapse the result to one number.
"""

# %%
from tokenfcm.linguistic import (
    ExpertTally,
    LinguisticScale,
    RiskIndexWeights,
    plt_defuzzify,
    rpn_plt,
    tally_to_plt,
)

scale = LinguisticScale(2)          # grades s_-2 .. s_2
weights = RiskIndexWeights(0.5, 0.35, 0.15)

# Inlet valve failure.
occurrence = ExpertTally((3, 5, 10, 1, 1))
severity = ExpertTally((0, 2, 9, 6, 3))
detection = ExpertTally((0, 2, 6, 7, 5))

# %%
# Each tally becomes a distribution over grades.
for label, t in [("O", occurrence), ("S", severity), ("D", detection)]:
    print(label, tally_to_plt(t, scale))

# %%
# The weighted product spreads into many fractional grades.
agg = rpn_plt(occurrence, severity, detection, weights, scale)
print(f"{len(agg)} terms after merging")
print("RPN =", round(plt_defuzzify(agg), 4))

# %%
# Severity matters: shift two severity votes from s_0 to s_2 and compare.
harsher = ExpertTally((0, 2, 7, 6, 5))
print("RPN with harsher severity =",
      round(plt_defuzzify(rpn_plt(occurrence, harsher, detection, weights, scale)), 4))
