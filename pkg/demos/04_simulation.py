# %% [markdown]
# # Two traders
#
# Each trader can idle or trade with either agent. A trade aimed at the
# other agent pays off (moves the actor into `gain`) mostly when the actor's
# reputation in the target's eyes is high. Trading with yourself rarely
# works. We pit a two-step planner against a trader that picks uniformly
# at random.

# %%
import json

import numpy as np

from repnet.generate import trade_domain
from repnet.simulator import Plan, Random, cumulative_impact, run

spec = trade_domain()
records = run(spec, [Plan(2), Random()], steps=200, seed=3)
print("cumulative impact:", {a: float(v) for a, v in zip(spec.agents, cumulative_impact(records))})

# %% [markdown]
# Which actions did each trader use?

# %%
for g, name in enumerate(spec.agents):
    counts = np.bincount([r.actions[g] for r in records], minlength=spec.n_actions)
    print(name, {a.name: int(c) for a, c in zip(spec.actions, counts)})

# %% [markdown]
# Trace records are single JSON lines, so runs can be diffed or streamed.
# The same seed always reproduces the same trace.

# %%
print(records[0].to_json(spec))
again = run(spec, [Plan(2), Random()], steps=200, seed=3)
print("reproducible:", [r.to_json(spec) for r in records] == [r.to_json(spec) for r in again])

# %% [markdown]
# Over many seeds the planner comes out ahead.

# %%
margins = []
for seed in range(10):
    tot = cumulative_impact(run(spec, [Plan(2), Random()], steps=200, seed=seed))
    margins.append(tot[0] - tot[1])
print("planner minus random, per seed:", np.round(margins, 1))
print(json.dumps({"wins": int(sum(m >= 0 for m in margins)), "seeds": len(margins)}))
