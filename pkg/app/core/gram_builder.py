import numpy as np

from models.coefficients import FourierCoeffs
from models.errors import LagOutOfRange
from models.pattern import ObservationPattern
from models.solution import GramMatrix


class GramBuilder:
    """Builds the Gram matrix of the missing indices from coefficients of 1/f"""

    def build_gram(self, pattern: ObservationPattern, coeffs: FourierCoeffs) -> GramMatrix:
        """B[u][v] = b(t_u - t_v) over the canonical order of K"""
        indices = pattern.missing_indices()
        lags = self._lag_matrix(indices)
        self._check_lags(lags, coeffs)
        matrix = coeffs.at(lags)
        return GramMatrix(matrix, indices)

    def _lag_matrix(self, indices: np.ndarray) -> np.ndarray:
        return indices[:, None] - indices[None, :]

    def _check_lags(self, lags: np.ndarray, coeffs: FourierCoeffs):
        widest = int(np.max(np.abs(lags))) if lags.size else 0
        if widest > coeffs.half_length:
            raise LagOutOfRange(
                f"Gram matrix needs lag {widest}, coefficients stop at {coeffs.half_length}",
                needed=widest, available=coeffs.half_length)

    def blocks(self, pattern: ObservationPattern, gram: GramMatrix) -> dict:
        """Named sub-blocks central/left/right of the assembled matrix"""
        parts = {
            "central": pattern.central_block,
            "left": pattern.left_block,
            "right": pattern.right_block,
        }
        return {(r, c): gram.block(rows, cols)
                for r, rows in parts.items() if rows.size
                for c, cols in parts.items() if cols.size}


def build_gram(pattern: ObservationPattern, coeffs: FourierCoeffs) -> GramMatrix:
    return GramBuilder().build_gram(pattern, coeffs)
