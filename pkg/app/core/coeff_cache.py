import hashlib
import threading
from typing import Dict, Optional

from models.coefficients import FourierCoeffs
from models.density import SpectralDensity


class CoefficientCache:
    """Memo of Fourier coefficients of 1/f keyed by density, half-length and grid"""

    def __init__(self, max_size: int = 100):
        self.cache: Dict[str, FourierCoeffs] = {}
        self.max_size = max_size
        self._lock = threading.Lock()

    def get_cache_key(self, density: SpectralDensity, half_length: int, grid: int) -> str:
        """Generate hash key for a density at a resolution"""
        key_str = f"{density.fingerprint()}:{half_length}:{grid}"
        return hashlib.md5(key_str.encode()).hexdigest()

    def get(self, density: SpectralDensity, half_length: int, grid: int) -> Optional[FourierCoeffs]:
        key = self.get_cache_key(density, half_length, grid)
        with self._lock:
            return self.cache.get(key)

    def put(self, density: SpectralDensity, half_length: int, grid: int, coeffs: FourierCoeffs):
        key = self.get_cache_key(density, half_length, grid)
        with self._lock:
            if key not in self.cache and len(self.cache) >= self.max_size:
                # Remove oldest entry
                self.cache.pop(next(iter(self.cache)))
            self.cache[key] = coeffs

    def clear(self):
        with self._lock:
            self.cache.clear()
