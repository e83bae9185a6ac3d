"""Deterministic seed derivation for independent sub-runs.

Every randomised component (detector, hiding run, target sampling) gets its
own seed derived from the master seed plus a key tuple, so results do not
depend on execution order or worker count.
"""

import hashlib


def derive_seed(master: int, *parts) -> int:
    """Stable 63-bit seed from a master seed and an arbitrary key tuple."""
    key = repr((int(master),) + tuple(parts)).encode()
    digest = hashlib.sha256(key).digest()
    return int.from_bytes(digest[:8], "big") >> 1
