# # Markovianising a correlated measure
#
# Two paths, (0,0,0) and (1,0,1), each with probability 1/2.  The middle state
# is always 0, yet start and end always agree: the measure is not Markov at
# index 1.

# %%
from markovhull import chain_product_oracle, markovianise_at, markov_defect
from markovhull.generators import correlated_pair
from markovhull.hull import pseudo_metric
from markovhull.markov import defect_profile, strong_markov_failures
from markovhull.measures import CylinderFunction, marginal_at

eta = correlated_pair()
print("defects before:", [str(d) for d in defect_profile(eta)])

# %% [markdown]
# Markovianising at 1 keeps the law of the past and of the future but forgets
# how they were coupled through the middle.

# %%
m1 = markovianise_at(eta, 1)
print(m1)
print("defect after:", markov_defect(m1, 1))

# %% [markdown]
# One-time marginals are untouched; the start-end coupling is what moved.

# %%
print(all(marginal_at(m1, t) == marginal_at(eta, t) for t in range(3)))
ends_agree_at_zero = CylinderFunction.indicator((0, 2), (0, 0))
print("pseudo-metric on {start = end = 0}:", pseudo_metric(eta, m1, ends_agree_at_zero))

# %% [markdown]
# The result is the Markov chain assembled from the consecutive two-time laws,
# and every conditional of it factors (strong Markov).

# %%
print(m1 == chain_product_oracle(eta))
print("strong Markov failures of eta:", strong_markov_failures(eta))
print("strong Markov failures of M_1(eta):", strong_markov_failures(m1))
