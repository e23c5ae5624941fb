"""Python access to the oscillating-flap simulator.

Results come back as plain dicts mirroring the CLI's JSON outputs.
"""

import json
import os

from ._core import InvalidInput, NumericalError, RunConfig, verify, wavelength

__all__ = [
    "InvalidInput",
    "NumericalError",
    "Model",
    "verify",
    "wavelength",
]


class Model:
    """A run configuration. Without a path the built-in reference is used."""

    def __init__(self, config=None):
        self._rc = RunConfig.reference() if config is None else RunConfig.load(os.fspath(config))

    @property
    def coefficient_label(self):
        return self._rc.coefficient_label

    def coefficients(self, period, distance=0.0):
        return self._rc.coefficients(period, distance)

    def simulate_torque(self, scenario, period, amplitude, distance=0.0):
        return json.loads(self._rc.simulate_torque(scenario, period, amplitude, distance))

    def simulate_wave(self, height, period, distance=0.0, heading=0.0):
        return json.loads(self._rc.simulate_wave(height, period, distance, heading))

    def sweep(self, study, workers=1, distances=None, periods=None):
        return json.loads(self._rc.sweep(study, workers, distances, periods))

    def aep(self, jpd, distances=(10, 15, 33, 45, 55, 70, 86), heading=0.0, workers=1):
        return json.loads(self._rc.aep(os.fspath(jpd), list(distances), heading, workers))
