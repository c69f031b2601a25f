"""Shipped gait library: parametric reference foot paths fitted onto the basis.

Each gait starts from a piecewise reference path in the leg plane: a straight
stance sweep at standing height followed by a semi-elliptic swing arc.  The
path is sampled over one cycle and least-squares fitted onto the polynomial
basis; the fitted weights are what the engine evaluates at run time.  The fit
residual per gait is recorded alongside the library as its provenance check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import yaml

from .cpg import NUM_LEGS, TAU
from .errors import ConfigurationError
from .trajectory import GaitDefinition, fit_weights

STANDING_HEIGHT = 0.22  # m, foot below hip in stance

FIT_SAMPLES = 64

# Leg order used throughout: front-left, front-right, hind-left, hind-right.
LEG_NAMES = ("fl", "fr", "hl", "hr")

TROT_OFFSETS = (0.0, math.pi, math.pi, 0.0)
BOUND_OFFSETS = (0.0, 0.0, math.pi, math.pi)
WALK_OFFSETS = (0.0, math.pi, 0.5 * math.pi, 1.5 * math.pi)
GALLOP_OFFSETS = (0.0, 0.5 * math.pi, math.pi, 1.5 * math.pi)


@dataclass(frozen=True)
class ReferencePath:
    """Stance/swing reference: stride length, swing clearance, standing height (m)."""

    stride: float
    clearance: float
    height: float = STANDING_HEIGHT

    def point(self, phi: float) -> tuple[float, float]:
        """Reference endpoint at a wrapped phase.

        Stance over [0, pi): foot sweeps from +stride/2 to -stride/2 at the
        standing height.  Swing over [pi, 2*pi): semi-ellipse back to the
        stance start, lifting by the clearance at mid-swing.
        """
        half = 0.5 * self.stride
        if phi < math.pi:
            frac = phi / math.pi
            return half - self.stride * frac, self.height
        s = (phi - math.pi) / math.pi
        x = -half * math.cos(math.pi * s)
        y = self.height - self.clearance * math.sin(math.pi * s)
        return x, y

    def samples(self, count: int = FIT_SAMPLES):
        """Chebyshev-Lobatto sample phases: clustering at the cycle ends pins
        the fitted polynomial's wrap values together, which is what lets the
        endpoint filter smooth the residual wrap step."""
        k = np.arange(count)
        phis = math.pi * (1.0 - np.cos(math.pi * k / (count - 1)))
        phis[-1] = TAU * (1.0 - 1e-12)
        return [(float(p),) + self.point(float(p)) for p in phis]

    def samples_uniform(self, count: int = FIT_SAMPLES):
        phis = np.arange(count) * (TAU / count)
        return [(float(p),) + self.point(float(p)) for p in phis]


# (reference path, phase offsets, nominal frequency Hz) per shipped gait.
# The two modified trots keep the trot pattern: one shortens the stride,
# the other raises the swing clearance.
GAIT_RECIPES = {
    "trot": (ReferencePath(stride=0.10, clearance=0.04), TROT_OFFSETS, 1.5),
    "gallop": (ReferencePath(stride=0.10, clearance=0.05), GALLOP_OFFSETS, 2.0),
    "bound": (ReferencePath(stride=0.08, clearance=0.05), BOUND_OFFSETS, 2.0),
    "walk": (ReferencePath(stride=0.08, clearance=0.03), WALK_OFFSETS, 1.0),
    "modified_trot_1": (ReferencePath(stride=0.06, clearance=0.04), TROT_OFFSETS, 1.5),
    "modified_trot_2": (ReferencePath(stride=0.10, clearance=0.06), TROT_OFFSETS, 1.5),
}

GAIT_NAMES = tuple(GAIT_RECIPES)


def build_gait(name: str, path: ReferencePath, offsets, frequency_hz: float,
               samples: int = FIT_SAMPLES) -> tuple[GaitDefinition, float]:
    """Fit one leg's reference path and replicate the weight rows across legs
    (each leg's phase already carries its offset).  Returns (gait, residual)."""
    wx, wy, residual = fit_weights(path.samples(samples))
    weights_x = np.tile(wx, (NUM_LEGS, 1))
    weights_y = np.tile(wy, (NUM_LEGS, 1))
    gait = GaitDefinition(
        name=name,
        weights_x=weights_x,
        weights_y=weights_y,
        target_offsets=np.array(offsets, dtype=float),
        nominal_frequency=TAU * frequency_hz,
    )
    return gait, residual


def default_library() -> dict[str, GaitDefinition]:
    """Build the six shipped gaits from their reference recipes."""
    library = {}
    for name, (path, offsets, hz) in GAIT_RECIPES.items():
        gait, _ = build_gait(name, path, offsets, hz)
        library[name] = gait
    return library


def library_residuals() -> dict[str, float]:
    """Max fit residual (m) per shipped gait; frozen in the golden data."""
    residuals = {}
    for name, (path, offsets, hz) in GAIT_RECIPES.items():
        _, residual = build_gait(name, path, offsets, hz)
        residuals[name] = residual
    return residuals


def save_library(path, library: dict[str, GaitDefinition]):
    """Write the library as human-editable YAML, one document per gait.

    Offsets are stored as cycle fractions and the nominal frequency in Hz.
    """
    docs = []
    for gait in library.values():
        docs.append({
            "name": gait.name,
            "offsets": [float(o) / TAU for o in gait.target_offsets],
            "frequency_hz": float(gait.nominal_frequency) / TAU,
            "weights_x": [[float(w) for w in row] for row in gait.weights_x],
            "weights_y": [[float(w) for w in row] for row in gait.weights_y],
        })
    with open(path, "w", encoding="utf-8") as handle:
        yaml.safe_dump_all(docs, handle, sort_keys=False)


def load_library(path) -> dict[str, GaitDefinition]:
    """Load a YAML gait library written by save_library (or by hand)."""
    with open(path, "r", encoding="utf-8") as handle:
        docs = list(yaml.safe_load_all(handle))
    library = {}
    for doc in docs:
        if doc is None:
            continue
        try:
            gait = GaitDefinition(
                name=str(doc["name"]),
                weights_x=np.array(doc["weights_x"], dtype=float),
                weights_y=np.array(doc["weights_y"], dtype=float),
                target_offsets=np.array([TAU * float(o) for o in doc["offsets"]]),
                nominal_frequency=TAU * float(doc["frequency_hz"]),
            )
        except KeyError as exc:
            raise ConfigurationError(f"gait document missing field {exc}") from exc
        library[gait.name] = gait
    if not library:
        raise ConfigurationError(f"no gaits found in {path}")
    return library
