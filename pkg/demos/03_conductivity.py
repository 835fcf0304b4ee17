# Effective conductivity of 2PC-equivalent structures (k1 = 10, k2 = 1).
# Identical two-point statistics, visibly different tensors.

import numpy as np

from twopc.catalog import coalesced_pair_2d, flip_pair_2d, root_pair_2d
from twopc.homog import ConductivityProblem, bounds, effective_conductivity, relative_deviation
from twopc.structure import volume_fractions

np.set_printoptions(precision=4, suppress=True)


def tensor(S, f):
    return effective_conductivity(ConductivityProblem(S, 10.0, 1.0), f).matrix


for f in (2, 32):
    K1, K2 = (tensor(S, f) for S in root_pair_2d())
    print(f"{f}x roots\n{K1}\n{K2}\ndeviation {100 * relative_deviation(K1, K2):.2f}%")

for f in (2, 32):
    K1, K2 = (tensor(S, f) for S in coalesced_pair_2d())
    print(f"{f}x derived pair deviation {100 * relative_deviation(K1, K2):.2f}%")

# two-pixel swaps of the first root; the first one percolates along axis 0
K = tensor(root_pair_2d()[0], 32)
for S in flip_pair_2d():
    Kf = tensor(S, 32)
    print(np.diag(Kf), f"{100 * relative_deviation(K, Kf):.2f}% from the root")

v1 = float(volume_fractions(root_pair_2d()[0])[0])
print(bounds(v1, 10.0, 1.0))
