# %% [markdown]
# # Beliefs about yourself and about others
#
# Every agent keeps one belief per agent in the network. Its own belief is
# a plain Bayes filter over its own action. Beliefs about the others have
# to marginalise over what they might have done, weighted by the learned
# action model `ad`.

# %%
import numpy as np

from repnet import bse, ose, rep_of, sse
from repnet.generate import identifying_sensor_domain, noisy_sensor_domain
from repnet.learning import ade

np.set_printoptions(precision=4, suppress=True)

spec = noisy_sensor_domain()
x, y = spec.agent_index("x"), spec.agent_index("y")
view = spec.initial_view(x)
print(spec.agents, spec.states, [a.name for a in spec.actions], spec.observations)

# %% [markdown]
# x waits and its sensor says things look good. The sensor is right 80% of
# the time and `wait` is sticky, so the posterior tilts towards `good`.

# %%
wait, looks_good = spec.action_index("wait"), spec.obs_index("looks_good")
print("own belief  :", ose(spec, x, wait, looks_good, view.beliefs[x], rep_of(x, x, view.img)))

# %% [markdown]
# The same observation also moves x's belief about y, but less sharply:
# y might have waited or helped, and helping succeeds with a probability
# that depends on y's reputation as x sees it.

# %%
r = rep_of(x, y, view.img)
print(f"rep_of(x, y) = {r:.3f}")
print("belief of y :", sse(spec, x, y, looks_good, view.beliefs[y], view.ad, r))
print("whole map   :\n", bse(spec, x, wait, looks_good, view))

# %% [markdown]
# # Learning what others do
#
# In a domain whose sensor names the action that was just performed, a
# single observation pins the action model down.

# %%
ident = identifying_sensor_domain(accuracy=1.0)
v = ident.initial_view(0)
print("prior row    :", v.ad[1, 0])
print("after saw2   :", ade(ident, 0, ident.obs_index("saw2"), v.ad, v.img)[1, 0])

# %% [markdown]
# With a noisy sensor the model only drifts. Repeatedly seeing `saw1`
# moves the mass gradually onto `act1`.

# %%
noisy_ident = identifying_sensor_domain(accuracy=0.6)
v = noisy_ident.initial_view(0)
ad = v.ad
for t in range(1, 6):
    ad = ade(noisy_ident, 0, 1, ad, v.img)
    print(t, ad[1, 0])
