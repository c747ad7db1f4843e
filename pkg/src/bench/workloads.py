"""Synthetic workloads shaped like the evaluated datasets and models."""

from typing import Dict, Optional, Sequence

import numpy as np

from src.errors import ConfigurationError
from src.models.bench_models import WorkloadSpec
from src.models.tensor_models import QuantMode, QuantParams, TensorPlain

# Shape and fraction of nonzero elements per dataset sample.
WORKLOAD_PRESETS: Dict[str, WorkloadSpec] = {
    "mnist": WorkloadSpec(name="mnist", shape=[28, 28], nonempty_rate=0.1790, bit_width=8),
    "stanford_cars": WorkloadSpec(name="stanford_cars", shape=[360, 640], nonempty_rate=0.9873, bit_width=8),
    "cmu_arctic": WorkloadSpec(name="cmu_arctic", shape=[64, 321], nonempty_rate=0.9972, bit_width=8),
}


def _conv_params(in_channels: int, out_channels: int, kernel: int) -> int:
    return in_channels * out_channels * kernel * kernel + out_channels


def _dense_params(inputs: int, outputs: int) -> int:
    return inputs * outputs + outputs


# Flat weight counts (weights plus biases).
MODEL_PRESETS: Dict[str, int] = {
    "cnn": _conv_params(1, 10, 5) + _conv_params(10, 20, 5),
    "mlp": _dense_params(784, 64) + _dense_params(64, 10),
}


def workload_spec(
    name: str,
    shape: Optional[Sequence[int]] = None,
    rate: Optional[float] = None,
    bit_width: Optional[int] = None,
    sample_count: int = 1,
    seed: Optional[int] = None,
) -> WorkloadSpec:
    """
    Resolve a preset and apply overrides.

    Raises:
        ConfigurationError: for an unknown preset name
    """
    try:
        preset = WORKLOAD_PRESETS[name]
    except KeyError as exc:
        raise ConfigurationError(
            f"Unknown workload {name!r}; expected one of {sorted(WORKLOAD_PRESETS)}"
        ) from exc

    updates = {"sample_count": sample_count, "seed": seed}
    if shape is not None:
        updates["shape"] = list(shape)
    if rate is not None:
        updates["nonempty_rate"] = rate
    if bit_width is not None:
        updates["bit_width"] = bit_width
    return WorkloadSpec.model_validate({**preset.model_dump(), **updates})


def model_size(model: Optional[str], default: int) -> int:
    if model is None:
        return default
    try:
        return MODEL_PRESETS[model]
    except KeyError as exc:
        raise ConfigurationError(f"Unknown model {model!r}; expected one of {sorted(MODEL_PRESETS)}") from exc


def synth_tensor(spec: WorkloadSpec, rng: np.random.Generator) -> TensorPlain:
    """
    Draw a tensor whose nonzero fraction is ``spec.nonempty_rate`` on average.

    Each element is nonzero with that probability; nonzero values are
    uniform over ``[1, 2**B)``.
    """
    mask = rng.random(spec.size) < spec.nonempty_rate
    values = rng.integers(1, 1 << spec.bit_width, size=spec.size, dtype=np.int64)
    values[~mask] = 0
    quant = QuantParams(scale=1.0, bit_width=spec.bit_width, mode=QuantMode.UNSIGNED)
    return TensorPlain(shape=list(spec.shape), values=values.tolist(), quant=quant)


def synth_weights(size: int, rng: np.random.Generator, spread: float = 0.5) -> np.ndarray:
    """Real-valued model update with entries in [-spread, spread]."""
    return rng.uniform(-spread, spread, size=size)
