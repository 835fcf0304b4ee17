# Growing new 2PC-equivalent pairs from a root pair: phase extension,
# kernel stamping, phase merging and plain pixel replication.

from twopc.catalog import kernels_2d, kernels_3d, root_pair_1d, root_pair_2d
from twopc.derive import coalesce, kernel_extend, phase_extend, upsample
from twopc.structure import equivalent, volume_fractions

A, B = root_pair_2d(mirrored=True)

# stride (2, 3) embedding, gaps become phase 3
A1, B1 = phase_extend(A, (2, 3)), phase_extend(B, (2, 3))
print("phase extended:", A1.dims, equivalent(A1, B1))

# every phase-alpha cell becomes a 2 x 3 stamp
K = kernels_2d()
A2, B2 = kernel_extend(A, K), kernel_extend(B, K)
print("kernel extended:", A2.dims, equivalent(A2, B2))
print(A2.cells)

# merge phases 1 and 2
A3, B3 = coalesce(A2, [1, 1, 2]), coalesce(B2, [1, 1, 2])
print("coalesced:", equivalent(A3, B3), "v1 =", volume_fractions(A3)[0])

# 1D roots become 3D structures with 2 x 2 x 3 kernels
X, Y = (kernel_extend(S, kernels_3d()) for S in root_pair_1d())
print("3D children:", X.dims, equivalent(X, Y))

U, V = upsample(A3, (2, 2)), upsample(B3, (2, 2))
print("2x resolution:", U.dims, equivalent(U, V))
