# The root pair agrees on all 2PCs but not on the 3PC of phase 1.

from twopc.catalog import root_pair_2d
from twopc.derive import upsample
from twopc.structure import mpc_deviation

for f in (1, 2, 4):
    S1, S2 = (upsample(S, (f, f)) for S in root_pair_2d())
    diff, ref = mpc_deviation(S1, S2, (1, 1, 1))
    print(f"{f}x: {100 * diff / ref:.2f}%")
