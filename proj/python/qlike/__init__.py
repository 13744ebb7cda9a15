"""Python access to the qlike C++ core."""

import csv
import io
import json

from . import _core
from ._core import (
    QasmParseError,
    SynthesisError,
    approx_log_likelihood,
    born_probabilities,
    exact_log_likelihood,
    export_qasm,
    kl_divergence,
    roundtrip_qasm,
)

__version__ = _core.__version__

__all__ = [
    "QasmParseError",
    "SynthesisError",
    "approx_log_likelihood",
    "born_probabilities",
    "compare",
    "curve",
    "decompose",
    "exact_log_likelihood",
    "export_qasm",
    "kl_divergence",
    "optimize",
    "roundtrip_qasm",
    "sample",
]


def optimize(beta, delta, strategy="direct", seed=0, restarts=8, iterations=5000, search_group="so4"):
    return json.loads(_core.optimize_json(beta, delta, strategy, seed, restarts, iterations, search_group))


def compare(beta, delta, seed=0, reference=None):
    return json.loads(_core.compare_json(beta, delta, seed, reference))


def decompose(unitary):
    return json.loads(_core.decompose_json([[complex(z) for z in row] for row in unitary]))


def sample(qasm, shots, seed, workers=1, depolarizing_1q=0.0, depolarizing_2q=0.0, readout_flip=0.0):
    return json.loads(
        _core.sample_json(qasm, shots, seed, workers, depolarizing_1q, depolarizing_2q, readout_flip)
    )


def curve(beta, delta, n_max, seed=0):
    """Rows of (N, direct, entangled) log-likelihoods."""
    text = _core.curve_csv(beta, delta, n_max, seed)
    body = "\n".join(line for line in text.splitlines() if not line.startswith("#"))
    return [(int(r["N"]), float(r["log_likelihood_direct"]), float(r["log_likelihood_entangled"]))
            for r in csv.DictReader(io.StringIO(body))]
