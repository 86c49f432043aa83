"""Chaotic-map stream ciphers perturbed by Mersenne-order LFSRs.

Two generators are provided, one on the skew tent map and one on the modified
logistic map. Each XORs the LSB of the fixed-point map state with an LFSR bit,
emits the result as keystream, and feeds the perturbed state back into the
map.
"""

from .chaotic_maps import (
    FixedPointValue,
    MapKind,
    MlmParams,
    StmParams,
    fp_from_real,
    map_step,
    mlm_derive_constants,
    mlm_step,
    stm_step,
)
from .cipher import InvalidKey, Key, decrypt, encrypt, key_encode, key_parse, keygen
from .keystream import GeneratorState, ks_bits, ks_bytes, ks_next_bit, measure_period
from .lfsr import is_irreducible, lfsr_new, lfsr_period, lfsr_step

__version__ = "0.1.0"
