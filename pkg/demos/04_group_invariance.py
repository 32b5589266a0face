# # Translation-invariant measures on a group
#
# States are elements of a finite group, and a group element acts on a path
# pointwise.  Averaging any measure over the group gives an invariant one;
# Markovianisation keeps it invariant.

# %%

from markovhull import FiniteGroup, GroupAction, PathMeasure, group_average, is_translation_invariant, markovianise_at
from markovhull.groups import invariant_disintegration, markov_regularity_report, translate_measure

z3 = FiniteGroup.cyclic(3)
left = GroupAction(z3, "left")
space = z3.path_space(3)
avg = group_average(PathMeasure.dirac(space, (0, 1, 2)), left)
print(avg)

# %% [markdown]
# Every conditional is a translate of the one at the identity.

# %%
base = invariant_disintegration(avg, 0, left)
print("identity conditional:", base)
print("translate by 1:", translate_measure(1, base, left))

# %% [markdown]
# On S_3 the left and right actions differ.  A left-averaged measure need not be
# right invariant, but the operator preserves whichever invariance holds.

# %%
s3 = FiniteGroup.symmetric3()
for side in ("left", "right"):
    action = GroupAction(s3, side)
    rho = PathMeasure(s3.path_space(3), {(0, 1, 4): 1, (2, 2, 5): 2})
    m = group_average(rho, action)
    other = GroupAction(s3, "right" if side == "left" else "left")
    print(side, "invariant:", is_translation_invariant(m, action),
          "| other side:", is_translation_invariant(m, other),
          "| after M_1:", is_translation_invariant(markovianise_at(m, 1), action))
    print("  regularity witness passes:", markov_regularity_report(m, action).all_pass)
