# # Rotating time on a cyclic grid
#
# On a cyclic space a path can be rotated in time.  Pinning at (t, x) and then
# rotating matches rotating and then pinning at (t + h, x) when the block of
# coordinates that wraps around carries no randomness.

# %%
import random

from markovhull.generators import padded_cyclic_case, wrapping_counterexample
from markovhull.markov import check_shift_equivariance, seam_blocks, seam_is_deterministic
from markovhull.paths import PathSpace

rng = random.Random(3)
space = PathSpace.simple(3, 5, cyclic=True)
case = padded_cyclic_case(space, rng)
print("pin", case.pin, "state", case.state, "rotation", case.steps)
print("swapped blocks:", seam_blocks(space.n_times, case.steps))
print(case.measure)
print("equivariant:", check_shift_equivariance(case.measure, case.pin, case.steps, case.state))

# %% [markdown]
# When the wrapped block is random, rotation moves correlated coordinates from
# behind the pin to in front of it and the two sides disagree.

# %%
bad = wrapping_counterexample()
print(bad.measure)
print("deterministic seam:", seam_is_deterministic(bad.measure, bad.steps))
print("equivariant:", check_shift_equivariance(bad.measure, bad.pin, bad.steps, bad.state))
