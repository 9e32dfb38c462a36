#!/usr/bin/env python3
"""Sieving a range, counting primes, and scanning consecutive-prime gaps.

The segmented sieve keeps memory flat no matter how far the range goes;
prime counts, gap extremes, and the multiplicative-function tables all
come from the same primality bits.
"""

import time

from primelab import arith_tables, gap_scan, prime_count, primorial, sieve_range


def main():
    table = sieve_range(0, 100)
    print("primes below 100:", table.primes().tolist())

    t0 = time.perf_counter()
    count = prime_count(10**8)
    print(f"\npi(10^8) = {count:,} (took {time.perf_counter() - t0:.2f}s)")
    print(f"pi(x) * log(x) / x at 10^8: {count * 18.4207 / 10**8:.4f} (drifts toward 1)")

    scan = gap_scan(2, 10**6)
    print(f"\ngaps in [2, 10^6): min {scan.min_gap}, max {scan.max_gap}")

    t = arith_tables(30)
    print("\nmu on 1..30:", t.mobius[1:31].tolist())
    print("omega(30) =", int(t.omega[30]), " phi(30) =", int(t.totient[30]))
    print("prime powers up to 30:", sorted(t.mangoldt.items()))

    print("\nprimorial(97) =", primorial(97))


if __name__ == "__main__":
    main()
