"""Structured results of quantitative checks, plus small fitting helpers."""

import json
from dataclasses import dataclass, field

import numpy as np

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass
class EstimateReport:
    """One lemma/condition check: inputs, measurements, fits, verdict."""

    name: str
    parameters: dict = field(default_factory=dict)
    measurements: list = field(default_factory=list)  # (descriptor, value) pairs
    fitted_constants: dict = field(default_factory=dict)
    verdict: str = INCONCLUSIVE
    provenance: str = ""

    def add(self, descriptor, value):
        self.measurements.append((str(descriptor), float(np.real(value))))

    def to_json(self):
        # stable field order for reproducible artifacts
        payload = {
            "name": self.name,
            "parameters": {k: self.parameters[k] for k in sorted(self.parameters)},
            "measurements": [[d, v] for d, v in self.measurements],
            "fitted_constants": {
                k: self.fitted_constants[k] for k in sorted(self.fitted_constants)
            },
            "verdict": self.verdict,
            "provenance": self.provenance,
        }
        return json.dumps(payload, indent=2, default=_coerce)

    def to_table(self):
        lines = [f"== {self.name} [{self.verdict}] =="]
        if self.parameters:
            lines.append("parameters:")
            for k in sorted(self.parameters):
                lines.append(f"  {k} = {self.parameters[k]}")
        if self.fitted_constants:
            lines.append("fitted:")
            for k in sorted(self.fitted_constants):
                v = self.fitted_constants[k]
                lines.append(f"  {k} = {v:.6g}" if isinstance(v, float) else f"  {k} = {v}")
        if self.measurements:
            lines.append("measurements:")
            for d, v in self.measurements:
                lines.append(f"  {d:40s} {v: .6e}")
        return "\n".join(lines)

    def to_csv(self):
        rows = ["descriptor,value"]
        rows += [f"{d},{v!r}" for d, v in self.measurements]
        return "\n".join(rows) + "\n"


def _coerce(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def loglog_slope(x, y):
    """Least-squares slope of log y against log x."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    slope, _ = np.polyfit(lx, ly, 1)
    return float(slope)


def flatness(param, values):
    """(max/min ratio, slope of value vs log param) for a positive sweep."""
    v = np.asarray(values, float)
    ratio = float(v.max() / v.min())
    slope, _ = np.polyfit(np.log(np.asarray(param, float)), v, 1)
    return ratio, float(slope)


def bounded_no_trend(param, values, slope_tol=0.05, ratio_tol=5.0):
    """'Bounded with no trend': |slope| within tol and max/min within ratio.

    The slope is measured after normalizing values by their mean so the
    tolerance is scale-free.
    """
    v = np.asarray(values, float)
    ratio, slope = flatness(param, v / v.mean())
    ok = abs(slope) <= slope_tol and ratio <= ratio_tol
    return ok, {"ratio": ratio, "slope": slope}
