"""Small shared helpers."""

import hashlib


def derive_seed(*parts):
    """Stable 63-bit seed derived from a tuple of ints / strings.

    Used to give every round, pass, and sampling site its own independent
    RNG stream while keeping whole runs reproducible from one top seed.
    """
    text = "\x1f".join(str(p) for p in parts)
    h = hashlib.blake2b(text.encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big") >> 1
