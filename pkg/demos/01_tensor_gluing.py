# # Gluing a past and a future
#
# A pinned past lives on [0, k] and ends at state x; a pinned future lives on
# [k, last] and starts at x.  Their tensor is the law on full paths under
# which the two halves are independent with exactly those laws.

# %%
from fractions import Fraction as F

from markovhull import PartialPathMeasure, PathSpace, PinnedMeasure, tensor_at
from markovhull.measures import product, pushforward
from markovhull.paths import Interval
from markovhull.tensor import pair_restriction, tensor_via_pullback

space = PathSpace.simple(n_states=2, n_times=3)
past = PinnedMeasure(PartialPathMeasure(space, Interval(0, 1), {(0, 0): F(1, 2), (1, 0): F(1, 2)}), 1, 0)
future = PinnedMeasure(PartialPathMeasure(space, Interval(1, 2), {(0, 0): F(1, 3), (0, 1): F(2, 3)}), 1, 0)

glued = tensor_at(past, future)
print(glued)

# %% [markdown]
# Splitting each glued path back at the pin recovers the product law, atom by atom.

# %%
split = pushforward(glued, pair_restriction(1))
print(dict(split.items()) == dict(product(past.measure, future.measure).items()))

# %% [markdown]
# The same measure comes out of pulling the product back through the split map,
# enumerating every admissible path through the pin.

# %%
print(tensor_via_pullback(past, future).to_path_measure() == glued)

# %% [markdown]
# Masses multiply: doubling the past doubles the result.

# %%
heavy = PinnedMeasure(past.measure.scaled(2), 1, 0)
print(tensor_at(heavy, future).total_mass())
