#!/usr/bin/env python3
"""Admissible tuples: verification certificates and narrow-tuple search.

A k-tuple of offsets is admissible when it misses at least one residue
class modulo every prime; only primes up to k matter. The verifier emits
one avoided class per prime, and the refutation (when a tuple fails)
names the first prime whose classes are all hit.
"""

from primelab import greedy_narrow_tuple, is_admissible, prime_offset_tuple
from primelab.tuples import Refutation


def main():
    for offsets in ([0, 2], [0, 2, 4], [0, 2, 6], [0, 4, 6, 10, 12, 16]):
        verdict = is_admissible(offsets)
        if isinstance(verdict, Refutation):
            print(f"{offsets}: refuted mod {verdict.prime} (classes {verdict.covering})")
        else:
            print(f"{offsets}: admissible, certificate {verdict.certificate}")

    print("\nfirst-primes-above-k construction:")
    for k in (5, 20, 105):
        tup = prime_offset_tuple(k)
        print(f"  k={k}: diameter {tup.diameter}")

    print("\ngreedy class-removal search (window pinned to the baseline):")
    baseline = prime_offset_tuple(105).diameter
    tup = greedy_narrow_tuple(105, baseline)
    print(f"  k=105 in [0, {baseline}]: diameter {tup.diameter}")
    print("  (the narrowest known 105-tuple fits in [0, 600]; greedy gets close)")


if __name__ == "__main__":
    main()
