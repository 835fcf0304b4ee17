# Brute-force search for structures that share every two-point correlation
# but cannot be mapped onto each other by shifts, reflections or relabeling.

from twopc.search import SearchSpec, find_root_sets
from twopc.structure import two_point

# 4 x 3 cells, two phases: 4096 candidates.
classes = find_root_sets(SearchSpec((4, 3), 2))
print(f"{len(classes)} class(es) on a 4 x 3 grid")

S1, S2 = classes[0].members
print(S1.cells)
print(S2.cells)
print("C_11 of both:")
print(two_point(S1, 1, 1))
print(two_point(S2, 1, 1))

# Period 12 in one dimension gives several classes.
for cls in find_root_sets(SearchSpec((12,), 2)):
    print([m.cells.tolist() for m in cls.members])
