"""graphtab: flatten attributed graphs into augmented feature tables and
score nodes for anomalies with training-free in-context backends."""

from ._kernels import backend_name
from .graph import Graph, adjacency_matvec, connected_components, load_edge_list
from .spectral import SpectralEmbedding, laplacian_embeddings
from .structural import StructuralCharacteristics, pagerank, structural_characteristics
from .table import AugmentedTable, assemble, export_table, import_table, standardize
from .wavelet import WaveletBankOutput, apply_wavelet, beta_coefficient, wavelet_bank

__all__ = [
    "Graph",
    "adjacency_matvec",
    "connected_components",
    "load_edge_list",
    "SpectralEmbedding",
    "laplacian_embeddings",
    "StructuralCharacteristics",
    "pagerank",
    "structural_characteristics",
    "AugmentedTable",
    "assemble",
    "standardize",
    "export_table",
    "import_table",
    "WaveletBankOutput",
    "apply_wavelet",
    "beta_coefficient",
    "wavelet_bank",
    "backend_name",
]

__version__ = "0.1.0"
