"""Expected values for the built-in scenarios.

One place for every number the command line compares against: ranks of the
endomorphism algebras, cohomology ranks, sub-algebra and ideal ranks, and
the de Rham model dimensions.  Keys are stringified degrees so they match
the serialized reports directly.
"""

from __future__ import annotations


def formality_expectations(scenario: str, n: int) -> dict:
    if scenario == "trivial":
        return {
            "end_ranks": {"0": 6, "1": 8, "2": 4},
            "h_betti": {"0": 1, "2": 1},
            "resolution_exact": True,
            "witness_quasi_iso": True,
        }
    if scenario == "one-point":
        return {
            "end_ranks": {"-1": 1, "0": 9, "1": 11, "2": 4},
            "h_betti": {"0": 2, "1": 2, "2": 1},
            "kernel_ranks": {"-1": 0, "0": 3, "1": 8, "2": 4},
            "image_ranks": {"-1": 1, "0": 6, "1": 3},
            "resolution_exact": True,
            "witness_quasi_iso": True,
        }
    if scenario == "n-points":
        return {
            "end_ranks": {"-1": n, "0": 5 * n + 2, "1": 7 * n, "2": 2 * n},
            "h_betti": {"0": n + 1, "1": 2 * n, "2": 1},
            "sub_ranks": {"0": 2 * n + 3, "1": 5 * n + 1, "2": 2 * n},
            "ideal_ranks": {"1": n - 1, "2": n - 1},
            "ideal_acyclic": True,
            "resolution_exact": True,
            "chain_ok": True,
        }
    if scenario == "de-rham":
        return {
            "dimension": 9,
            "h_dimension": 5,
            "h_entry_dims": {"(1,1)": 2, "(1,2)": 1, "(2,1)": 1, "(2,2)": 1},
            "tau_squared_zero": True,
            "validates": True,
            "projection_quasi_iso": True,
        }
    raise ValueError(f"unknown scenario {scenario!r}")
