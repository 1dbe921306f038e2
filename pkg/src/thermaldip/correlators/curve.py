from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidInputError

ENGINE_TAGS = ("classical_analytic", "classical_mc", "quantum_analytic")


@dataclass
class Gamma2Curve:
    """Correlation estimates on a delay (or separation) grid.

    ``values`` are normalised so the uncorrelated baseline is 1.  Analytic
    engines carry ``stderr == 0``.  ``singles_1``/``singles_2`` are the mean
    detector rates as fractions of the total input, when the engine knows them.
    """

    delta_grid: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    n_samples: np.ndarray
    engine_tag: str
    singles_1: np.ndarray | None = None
    singles_2: np.ndarray | None = None
    singles_stderr: np.ndarray | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        self.delta_grid = np.asarray(self.delta_grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        self.stderr = np.asarray(self.stderr, dtype=float)
        self.n_samples = np.broadcast_to(np.asarray(self.n_samples, dtype=np.int64), self.values.shape).copy()
        if self.engine_tag not in ENGINE_TAGS:
            raise InvalidInputError(f"unknown engine tag {self.engine_tag!r}")
        if not (self.delta_grid.shape == self.values.shape == self.stderr.shape):
            raise InvalidInputError("grid, values and stderr must have equal shapes")
        if np.any(self.values < 0):
            raise InvalidInputError("correlation values must be >= 0")
        if self.engine_tag != "classical_mc" and np.any(self.stderr != 0):
            raise InvalidInputError("analytic curves carry zero stderr")
