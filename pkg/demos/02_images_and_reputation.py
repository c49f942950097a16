# %% [markdown]
# # Images and reputation
#
# An image is one agent's opinion of another in [-1, 1]. An update rule
# folds each new piece of evidence into the running image. Reputation
# averages the direct image with the second-hand images, each weighted by
# how the rater itself is regarded.

# %%
import numpy as np

from repnet import UpdateRule, image_expectation, perceived_image, rep_of, update_u
from repnet.generate import noisy_sensor_domain

np.set_printoptions(precision=4, suppress=True)

# %% [markdown]
# The difference rule moves a fraction `alpha` of the remaining distance
# towards the boundary, so it never quite gets there.

# %%
diff = UpdateRule("difference", 0.5)
r = 0.0
trail = []
for _ in range(6):
    r = update_u(diff, r, 1.0)
    trail.append(r)
print("difference, six good steps:", np.round(trail, 4))
print("one bad step afterwards   :", update_u(diff, r, -1.0))

# %% [markdown]
# Saturation clamps instead. After enough good news the image sticks at 1
# and the history is forgotten: two bad steps bring it back to 0 whether
# it took four or fifty good ones to get there.

# %%
sat = UpdateRule("saturation", 0.5)
for n_up in (4, 50):
    r = 0.0
    for _ in range(n_up):
        r = update_u(sat, r, 1.0)
    after = [r := update_u(sat, r, -1.0) for _ in range(2)]
    print(f"{n_up:2d} good then 2 bad: {after}")

# %% [markdown]
# Reputation with three agents. g asks what h is worth. h's own image of g
# counts directly; i's image of h counts in proportion to how much h likes i.

# %%
g, h, i = 0, 1, 2
img = np.zeros((3, 3))
for h_of_i in (-0.5, 0.0, 0.5):
    row = []
    for i_of_g in (-0.5, 0.0, 0.5):
        img[h, i], img[i, g] = h_of_i, i_of_g
        row.append(3 * rep_of(g, h, img))
    print(f"img(h,i)={h_of_i:+.1f}:", row)

# %% [markdown]
# Images evolve from expected impacts. Here x holds a neutral prior about
# everything, and one expectation step shows who it expects to be helped
# and hurt by whom.

# %%
spec = noisy_sensor_domain()
view = spec.initial_view(0)
print("perceived image of y by x:",
      perceived_image(spec, 0, 0, 1, view.beliefs, view.ad))
print("image profile after one step:\n",
      image_expectation(spec, 0, view.img, None, view.beliefs, view.ad))
