"""streambank: streaming truncated-SVD reduction and greedy coreset memory
banks for nearest-neighbor anomaly scoring."""

from ._kernels import backend as kernel_backend
from .bank import MemoryBank, ScoreReport, aggregate_image, load, save, score
from .coreset import (
    ComparisonCounter,
    CoresetConfig,
    CoresetResult,
    distance,
    greedy_sample,
)
from .costmodel import (
    CostQuery,
    predict_batchless,
    predict_incremental_closed,
    predict_incremental_sum,
    predict_policy,
)
from .errors import ConfigError, DataError, NumericalError, ShapeError, StreambankError
from .incremental import (
    BufferPolicy,
    IncrementalSampler,
    IncrementalSamplerConfig,
    SampleSet,
)
from .linalg import TruncatedSVD, frobenius_norm, matmul, truncated_svd
from .metrics import auroc
from .npyio import ArrayHeader, BatchStream, load_array, read_header, write_array, write_matrix
from .reducer import (
    BatchDecomposition,
    FinalBasis,
    IncrementalReducer,
    ReducerConfig,
    RotationMatrix,
    project_query,
    reduce_batch,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
