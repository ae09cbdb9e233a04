"""Simulate a latent diffusion and the spike train it evokes.

A mean-reverting scalar state is observed by a Gaussian-tuned population
centered at 0: cells prefer stimuli near the center, so spikes arrive
fastest when the state visits it, and each spike's mark is the preferred
stimulus of the cell that fired.
"""

import os

import numpy as np

from ppfilter import (EncoderParams, StateModel, generate_spikes,
                      simulate_path, total_rate)
from ppfilter.reports import write_path, write_spike_train

OUT = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(OUT, exist_ok=True)

model = StateModel.scalar(a=-1.0, d=0.5, mean0=0.0, var0=0.125)
enc = EncoderParams.scalar(center=0.0, pop_var=0.5, tc_var=0.1,
                           rate_scale=30.0)

path = simulate_path(model, horizon=10.0, dt=1e-3, seed=[2024, 1, 0])
train = generate_spikes(enc, path, seed=[2024, 2, 0, 0])

horizon = float(path.times[-1])
rates = total_rate(enc, path.states)
print(f"path: {path.times.size} nodes over [0, {horizon:g}]")
print(f"state range: [{path.states.min():+.3f}, {path.states.max():+.3f}]")
print(f"firing rate range: [{rates.min():.2f}, {rates.max():.2f}] spikes/s")
print(f"spikes: {len(train)} (mean rate {len(train) / horizon:.2f}/s)")
print(f"mark mean {train.marks.mean():+.3f}, mark std {train.marks.std():.3f}")

# rate is highest when the state sits on the population center
on_center = np.abs(path.states[:, 0]) < 0.1
print(f"mean rate on center {rates[on_center].mean():.2f} "
      f"vs off center {rates[~on_center].mean():.2f}")

write_path(os.path.join(OUT, "path.csv"), path.times, path.states)
write_spike_train(os.path.join(OUT, "spikes.csv"), train)
print(f"wrote path.csv, spikes.csv to {OUT}")
