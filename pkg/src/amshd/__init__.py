"""Hyperdimensional classification of acute mountain sickness from tabular
vitals, with pseudo-random, Sobol and Hadamard hypervector sources."""

from .classifier import EvalReport, Model, ModelFormatError, evaluate, load, noise_robustness, predict, save, train
from .data import Dataset, LabelScheme, SplitMode, SplitSpec, build_dataset, load_csv, mutual_information
from .encoder import Encoder, EncoderConfig, Variant
from .hv import BinaryHV, BipolarHV, bind, bundle, cosine, hamming, permute
from .randomness import SourceKind, generate_position_hvs

__version__ = "0.1.0"
