from dataclasses import dataclass, field, replace
from typing import List, Mapping, Optional

import numpy as np

from models.density import complex_to_dict, parse_complex
from models.enums import PatternKind
from models.errors import InvalidParameters, SupportMismatch

# Parameters each kind needs, all positive integers except N >= 0
REQUIRED_PARAMS = {
    PatternKind.S1: ("M1", "N", "T"),
    PatternKind.S2: ("N", "M2", "T"),
    PatternKind.S3: ("M1", "N", "M2", "T"),
    PatternKind.S4: ("M1", "N", "N1"),
    PatternKind.S5: ("N", "M2", "N2"),
    PatternKind.S6: ("M1", "N", "N1", "M2", "N2"),
}

# Block lengths that may be zero when a pattern is built directly
OPTIONAL_ZERO = ("N", "N1", "N2")


@dataclass(frozen=True)
class ObservationPattern:
    """Gap structure around the central block {0..N}.

    The target set K lists, in canonical order, the central block ascending,
    the left block descending from -M1-1 and the right block ascending from
    N+M2+1. Infinite blocks (S1-S3) are cut to T entries.
    """
    kind: PatternKind
    N: int = 0
    M1: int = 0
    N1: int = 0
    M2: int = 0
    N2: int = 0
    T: int = 0

    def __post_init__(self):
        for name in REQUIRED_PARAMS[self.kind]:
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise InvalidParameters(f"{self.kind.value}: {name} must be an integer, got {value!r}")
            minimum = 0 if name in OPTIONAL_ZERO else 1
            if value < minimum:
                raise InvalidParameters(f"{self.kind.value}: {name} must be >= {minimum}, got {value}")

    @property
    def left_length(self) -> int:
        if not self.kind.has_left_block:
            return 0
        return self.T if self.kind.left_is_infinite else self.N1

    @property
    def right_length(self) -> int:
        if not self.kind.has_right_block:
            return 0
        return self.T if self.kind.right_is_infinite else self.N2

    @property
    def central_block(self) -> np.ndarray:
        return np.arange(0, self.N + 1)

    @property
    def left_block(self) -> np.ndarray:
        return -self.M1 - 1 - np.arange(self.left_length)

    @property
    def right_block(self) -> np.ndarray:
        return self.N + self.M2 + 1 + np.arange(self.right_length)

    def missing_indices(self) -> np.ndarray:
        return np.concatenate([self.central_block, self.left_block, self.right_block]).astype(int)

    @property
    def size(self) -> int:
        return self.N + 1 + self.left_length + self.right_length

    @property
    def max_lag(self) -> int:
        indices = self.missing_indices()
        return int(indices.max() - indices.min())

    @property
    def anchor(self) -> Optional[int]:
        """Index the anchored least-favourable coefficients are centred on"""
        if self.kind in (PatternKind.S1, PatternKind.S4):
            return self.N
        if self.kind in (PatternKind.S2, PatternKind.S5):
            return 0
        if self.kind == PatternKind.S6:
            return self.N + self.M2 + self.N2
        return None

    def is_missing(self, j: int) -> bool:
        """Membership in the untruncated set K = Z \\ S"""
        if 0 <= j <= self.N:
            return True
        if j < 0 and self.kind.has_left_block and j <= -self.M1 - 1:
            return self.kind.left_is_infinite or j >= -self.M1 - self.N1
        if j > self.N and self.kind.has_right_block and j >= self.N + self.M2 + 1:
            return self.kind.right_is_infinite or j <= self.N + self.M2 + self.N2
        return False

    def is_observed(self, j: int) -> bool:
        return not self.is_missing(j)

    def observed_between(self, lo: int, hi: int) -> np.ndarray:
        return np.array([j for j in range(lo, hi + 1) if self.is_observed(j)], dtype=int)

    def with_truncation(self, T: int) -> "ObservationPattern":
        if not self.kind.is_infinite:
            raise InvalidParameters(f"{self.kind.value} has no truncation parameter")
        return replace(self, T=T)

    def to_dict(self) -> dict:
        data = {"kind": self.kind.value}
        for name in REQUIRED_PARAMS[self.kind]:
            data[name] = int(getattr(self, name))
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ObservationPattern":
        """Strict parsing: every block length read from a config must be positive"""
        try:
            kind = PatternKind(data["kind"])
        except (KeyError, ValueError) as exc:
            raise InvalidParameters(f"Unknown or missing pattern kind: {data.get('kind')!r}") from exc
        params = {}
        for name in REQUIRED_PARAMS[kind]:
            if name not in data:
                raise InvalidParameters(f"{kind.value}: missing parameter {name}")
            value = data[name]
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidParameters(f"{kind.value}: {name} must be an integer, got {value!r}")
            if name in ("N1", "N2") and value < 1:
                raise InvalidParameters(f"{kind.value}: {name} must be >= 1, got {value}")
            params[name] = value
        return cls(kind=kind, **params)


@dataclass(frozen=True)
class GeometricDecay:
    """Declared envelope |a(j)| <= C * rho^|j|"""
    C: float
    rho: float

    def __post_init__(self):
        if not self.C >= 0:
            raise InvalidParameters(f"Decay constant C must be non-negative, got {self.C}")
        if not 0 <= self.rho < 1:
            raise InvalidParameters(f"Decay rate rho must lie in [0, 1), got {self.rho}")

    def bound(self, j: int) -> float:
        return self.C * self.rho ** abs(j)

    def tail_norm(self, first_dropped: int) -> float:
        """Upper bound on the l2 norm of a one-sided tail starting at |j| = first_dropped"""
        return self.C * self.rho ** first_dropped / np.sqrt(1.0 - self.rho ** 2)


@dataclass(frozen=True)
class FunctionalWeights:
    """Weights a(j) of the functional A xi = sum_{j in K} a(j) xi(j).

    Either an explicit map (zeros outside the map) or, when only ``decay`` is
    given, the geometric generator a(j) = C * rho^|j|.
    """
    values: Mapping[int, complex] = field(default_factory=dict)
    decay: Optional[GeometricDecay] = None

    def __post_init__(self):
        normalised = {int(j): complex(v) for j, v in self.values.items()}
        object.__setattr__(self, "values", normalised)
        if self.decay is not None and normalised:
            for j, v in normalised.items():
                if abs(v) > self.decay.bound(j) * (1 + 1e-12):
                    raise InvalidParameters(f"a({j}) = {v} exceeds the declared decay envelope")

    @property
    def is_generator(self) -> bool:
        return not self.values and self.decay is not None

    def value(self, j: int) -> complex:
        if self.is_generator:
            return complex(self.decay.bound(j))
        return self.values.get(int(j), 0j)

    def _check_support(self, pattern: ObservationPattern):
        outside = [j for j in self.values if not pattern.is_missing(j)]
        if outside:
            raise SupportMismatch(f"Weights given at observed indices {sorted(outside)}", indices=sorted(outside))
        if pattern.kind.is_infinite and not self.values and self.decay is None:
            raise InvalidParameters("Infinite patterns need explicit weights or a declared geometric decay")

    def weight_vector(self, pattern: ObservationPattern) -> np.ndarray:
        """Weights ordered like ``pattern.missing_indices()``"""
        self._check_support(pattern)
        return np.array([self.value(j) for j in pattern.missing_indices()], dtype=complex)

    def tail_bound(self, pattern: ObservationPattern) -> float:
        """l2 bound on the weights dropped by the truncation of ``pattern``"""
        if not pattern.kind.is_infinite:
            return 0.0
        if self.is_generator:
            bounds = []
            if pattern.kind.left_is_infinite:
                bounds.append(self.decay.tail_norm(pattern.M1 + pattern.T + 1))
            if pattern.kind.right_is_infinite:
                bounds.append(self.decay.tail_norm(pattern.N + pattern.M2 + pattern.T + 1))
            return float(np.sqrt(sum(b ** 2 for b in bounds)))
        kept = set(pattern.missing_indices().tolist())
        dropped = [abs(v) ** 2 for j, v in self.values.items() if j not in kept]
        return float(np.sqrt(sum(dropped)))

    def is_positive(self, pattern: ObservationPattern, tol: float = 1e-12) -> bool:
        vector = self.weight_vector(pattern)
        return bool(np.all(vector.real > 0) and np.all(np.abs(vector.imag) <= tol * np.abs(vector.real)))

    def scaled(self, kappa: complex) -> "FunctionalWeights":
        if self.is_generator:
            if complex(kappa).imag != 0 or complex(kappa).real < 0:
                raise InvalidParameters("Geometric generators only scale by non-negative reals")
            return FunctionalWeights({}, GeometricDecay(self.decay.C * complex(kappa).real, self.decay.rho))
        return FunctionalWeights({j: kappa * v for j, v in self.values.items()})

    def to_dict(self) -> dict:
        data: dict = {}
        if self.values:
            data["values"] = {str(j): (complex_to_dict(v) if v.imag else v.real) for j, v in sorted(self.values.items())}
        if self.decay is not None:
            key = "geometric" if self.is_generator else "decay"
            data[key] = {"C": self.decay.C, "rho": self.decay.rho}
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "FunctionalWeights":
        """Accepts {"values": {...}}, {"geometric": {...}} or a bare {"j": a(j)} map"""
        if "geometric" in data:
            decay = data["geometric"]
            return cls({}, GeometricDecay(float(decay["C"]), float(decay["rho"])))
        raw = data.get("values", None)
        if raw is None:
            raw = {k: v for k, v in data.items() if k != "decay"}
        values = {int(j): parse_complex(v) for j, v in raw.items()}
        decay = None
        if "decay" in data:
            decay = GeometricDecay(float(data["decay"]["C"]), float(data["decay"]["rho"]))
        return cls(values, decay)

    @classmethod
    def constant(cls, pattern: ObservationPattern, value: complex = 1.0) -> "FunctionalWeights":
        return cls({int(j): value for j in pattern.missing_indices()})


def weights_on(pattern: ObservationPattern, vector: List[complex]) -> FunctionalWeights:
    """Weights from a vector ordered like ``pattern.missing_indices()``"""
    return FunctionalWeights({int(j): complex(v) for j, v in zip(pattern.missing_indices(), vector)})
