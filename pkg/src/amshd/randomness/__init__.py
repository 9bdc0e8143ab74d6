from .hadamard import hadamard_row, hadamard_rows, next_pow2, sylvester
from .lfsr import MAXIMAL_TAPS, LfsrState, lfsr_bits, lfsr_next, lfsr_period
from .misr import MisrGenerator, misr_step
from .sobol import SobolSource, direction_numbers, sobol_point, sobol_points, sobol_vector
from .sources import (
    SourceKind,
    OrthoHistogram,
    generate_position_hvs,
    misr_for,
    orthogonality_histogram,
    pairwise_hamming,
    uniform_stream,
)
