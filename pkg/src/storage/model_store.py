"""
JSON model files.

Every file carries a "type" tag (mnpca, 2d2pca or k2dpca). Arrays are stored
as {"shape": [...], "data": [...]} in row-major order; floats survive the
round trip exactly because json writes the shortest repr of each double.
MNPCA files keep what out-of-sample projection needs, not the training
feature matrices.
"""

import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np

from src.methods.baselines import K2dpcaModel, TwoDPcaModel
from src.methods.kernels import KernelSpec
from src.methods.mnpca import MnpcaModel
from src.methods.svd_features import FeatureSet, InverseMode
from src.utils.errors import DataFormatError, InvalidParameterError
from src.utils.logger import setup_logger

logger = setup_logger(__name__)

Model = Union[MnpcaModel, TwoDPcaModel, K2dpcaModel]

_FEATURE_ARRAYS = (
    'left_basis', 'right_basis', 'K1', 'K2',
    'K1_dag', 'K2_dag', 'K1_dag_sqrt', 'K2_dag_sqrt', 'F_bar',
)


def encode_array(values: np.ndarray) -> Dict[str, Any]:
    values = np.asarray(values, dtype=float)
    return {'shape': list(values.shape), 'data': values.ravel().tolist()}


def decode_array(entry: Dict[str, Any]) -> np.ndarray:
    try:
        return np.asarray(entry['data'], dtype=float).reshape(entry['shape'])
    except (KeyError, TypeError, ValueError) as e:
        raise DataFormatError(f"Invalid array entry: {e}") from e


def _mnpca_to_dict(model: MnpcaModel) -> Dict[str, Any]:
    fs = model.feature_set
    return {
        'type': 'mnpca',
        'n': int(model.n),
        'm': int(fs.m),
        'r': int(fs.r),
        'eps': float(fs.eps),
        'tie_tol': float(fs.tie_tol),
        'inverse_mode': fs.inverse_mode.value,
        'k1': fs.k1.to_dict(),
        'k2': fs.k2.to_dict(),
        **{name: encode_array(getattr(fs, name)) for name in _FEATURE_ARRAYS},
        'eigvals1': encode_array(model.eigvals1),
        'eigvals2': encode_array(model.eigvals2),
        'A': encode_array(model.A),
        'B': encode_array(model.B),
    }


def _mnpca_from_dict(data: Dict[str, Any]) -> MnpcaModel:
    fs = FeatureSet(
        m=int(data['m']),
        r=int(data['r']),
        eps=float(data['eps']),
        k1=KernelSpec.from_dict(data['k1']),
        k2=KernelSpec.from_dict(data['k2']),
        inverse_mode=InverseMode(data['inverse_mode']),
        tie_tol=float(data['tie_tol']),
        **{name: decode_array(data[name]) for name in _FEATURE_ARRAYS},
    )
    return MnpcaModel(
        feature_set=fs,
        eigvals1=decode_array(data['eigvals1']),
        eigvals2=decode_array(data['eigvals2']),
        A=decode_array(data['A']),
        B=decode_array(data['B']),
        n=int(data['n']),
    )


def _2d2pca_to_dict(model: TwoDPcaModel) -> Dict[str, Any]:
    return {
        'type': '2d2pca',
        'A': encode_array(model.A),
        'B': encode_array(model.B),
        'X_bar': encode_array(model.X_bar),
        'eigvals1': encode_array(model.eigvals1),
        'eigvals2': encode_array(model.eigvals2),
    }


def _2d2pca_from_dict(data: Dict[str, Any]) -> TwoDPcaModel:
    return TwoDPcaModel(**{
        name: decode_array(data[name]) for name in ('A', 'B', 'X_bar', 'eigvals1', 'eigvals2')
    })


_K2DPCA_ARRAYS = ('training_rows', 'alpha', 'eigvals', 'gram_row_means', 'row_reducer', 'score_mean')


def _k2dpca_to_dict(model: K2dpcaModel) -> Dict[str, Any]:
    return {
        'type': 'k2dpca',
        'row_kernel': model.row_kernel.to_dict(),
        'gram_mean': float(model.gram_mean),
        **{name: encode_array(getattr(model, name)) for name in _K2DPCA_ARRAYS},
    }


def _k2dpca_from_dict(data: Dict[str, Any]) -> K2dpcaModel:
    return K2dpcaModel(
        row_kernel=KernelSpec.from_dict(data['row_kernel']),
        gram_mean=float(data['gram_mean']),
        **{name: decode_array(data[name]) for name in _K2DPCA_ARRAYS},
    )


def model_to_dict(model: Model) -> Dict[str, Any]:
    if isinstance(model, MnpcaModel):
        return _mnpca_to_dict(model)
    if isinstance(model, TwoDPcaModel):
        return _2d2pca_to_dict(model)
    if isinstance(model, K2dpcaModel):
        return _k2dpca_to_dict(model)
    raise InvalidParameterError(f"Cannot serialize {type(model).__name__}")


_READERS = {
    'mnpca': _mnpca_from_dict,
    '2d2pca': _2d2pca_from_dict,
    'k2dpca': _k2dpca_from_dict,
}


def model_from_dict(data: Dict[str, Any]) -> Model:
    kind = data.get('type')
    if kind not in _READERS:
        raise DataFormatError(f"Unknown model type {kind!r}; expected one of {sorted(_READERS)}")
    try:
        return _READERS[kind](data)
    except KeyError as e:
        raise DataFormatError(f"Model file of type {kind!r} is missing field {e}") from e


def save_model(path: Union[str, Path], model: Model) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = model_to_dict(model)
    with open(path, 'w') as f:
        json.dump(data, f)
    logger.info(f"Saved {data['type']} model to {path}")
    return path


def load_model(path: Union[str, Path]) -> Model:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Model file not found: {path}")
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"{path} is not valid JSON: {e}") from e
    model = model_from_dict(data)
    logger.debug(f"Loaded {data['type']} model from {path}")
    return model
