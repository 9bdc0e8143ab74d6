"""How close to orthogonal are position hypervectors from each source?

Prints mean and spread of pairwise normalized Hamming distance for 100
vectors at a few dimensions.  Hadamard rows are exactly orthogonal, so their
spread collapses; the LFSR and Sobol streams behave like random vectors.
"""

from amshd.randomness import SourceKind, generate_position_hvs, pairwise_hamming

for dim in (128, 1000, 10000):
    for kind in SourceKind:
        d = pairwise_hamming(generate_position_hvs(kind, dim, 100, seed=0))
        print(f"D={dim:>5}  {kind.name.lower():<8}  mean={d.mean():.4f}  std={d.std():.4f}")
