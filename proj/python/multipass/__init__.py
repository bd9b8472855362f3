"""Python interface to the multi-pass automata library.

Words may be passed as lists of letters or as space-separated strings;
inverse letters are written ``a^-1``.
"""

from ._multipass import (
    Machine,
    ParseError,
    bs_matrix,
    britton_reduce,
    build_wp,
    complement,
    dihedral_normal_form,
    group_alphabet_of,
    group_evaluate,
    interleaved_product,
    intersection,
    inverse_gsm,
    left_quotient,
    onepass_to_pda,
    parikh,
    pda_run,
    pda_to_onepass,
    profile_decomposition,
    union,
    verify,
    wp_pullback,
)

__all__ = [name for name in dir() if not name.startswith("_")]
