"""gcskit: forward and inverse design of generalized cylindrical shells.

The package couples a parametric shell geometry (printable via binary
STL export) with a tandem pair of small neural networks that map the
12 design parameters to compressed force-displacement behavior and
back.  Submodules stay importable on their own; this namespace
re-exports the everyday types and entry points.
"""

from .applications import ImpactResult, ImpactSpec, emulate_material, make_target_curve, optimize_impact
from .curves import CurveMetrics, RawCurve, ResampledCurve, metrics, resample
from .dataset import Bundle, Dataset, filter_materials, ingest, load_bundle, save_bundle
from .geometry import (
    GcsDesign,
    GeometryError,
    Material,
    PrintabilityReport,
    TriangleMesh,
    build_mesh,
    check_printability,
    export_stl,
    solve_r0,
)
from .knn import KnnIndex, knn_forward, knn_inverse
from .pca import PcaModel
from .pca import fit as fit_pca
from .splits import SplitSpec, split_indices
from .tandem import (
    Mlp,
    TrainConfig,
    TrainHistory,
    forward_pass,
    loss_weights_from_pca,
    new_forward_net,
    new_inverse_net,
    train_forward,
    train_inverse,
)
from .vectorize import (
    decode_design,
    decode_performance,
    encode_design,
    encode_performance,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "GcsDesign",
    "GeometryError",
    "Material",
    "PrintabilityReport",
    "TriangleMesh",
    "build_mesh",
    "check_printability",
    "export_stl",
    "solve_r0",
    "RawCurve",
    "ResampledCurve",
    "CurveMetrics",
    "resample",
    "metrics",
    "PcaModel",
    "fit_pca",
    "encode_design",
    "decode_design",
    "encode_performance",
    "decode_performance",
    "SplitSpec",
    "split_indices",
    "Mlp",
    "TrainConfig",
    "TrainHistory",
    "new_forward_net",
    "new_inverse_net",
    "forward_pass",
    "loss_weights_from_pca",
    "train_forward",
    "train_inverse",
    "KnnIndex",
    "knn_forward",
    "knn_inverse",
    "Dataset",
    "ingest",
    "filter_materials",
    "Bundle",
    "save_bundle",
    "load_bundle",
    "ImpactSpec",
    "ImpactResult",
    "make_target_curve",
    "optimize_impact",
    "emulate_material",
]
