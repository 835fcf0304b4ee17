# Can one row of 2PC spectra fix all the others?  Only where the diagonal
# spectrum has no zeros.

from twopc.catalog import ambiguity_delta, vanishing_examples
from twopc.niezgoda import check_properties, count_vanishing, dft_map, reconstruct_from_row, verify_ambiguity

ex = vanishing_examples()
S = ex["1d"]
print(S.cells, "all relations hold:", check_properties(S).passed)
print("zeros per diagonal spectrum:", count_vanishing(S))

H = dft_map(S)
for gamma in (1, 2, 3):
    row = {b: H[(gamma, b)] for b in range(1, 3 + (gamma == 3))}
    rec = reconstruct_from_row(S.dims, 3, gamma, row)
    print(f"gamma={gamma}: division fails at {rec.undetermined_frequencies}, unique overall: {rec.unique}")

# a 4 x 3 structure where row 1 is genuinely ambiguous
T = ex["2d_a"]
rec = reconstruct_from_row(T.dims, 3, 1, {1: dft_map(T)[(1, 1)], 2: dft_map(T)[(1, 2)]})
print("2D, gamma=1 unique:", rec.unique)
print(verify_ambiguity(T, 1, ambiguity_delta()).checks)
