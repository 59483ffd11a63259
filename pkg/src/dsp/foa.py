"""
First-order ambisonic (ACN w, y, z, x) time-frequency features.
"""

import numpy as np

from src.models.audio import AudioLayout
from .cues import CueSequence
from .stft import DspError, Spectrogram

W, Y, Z, X = range(4)


def _check_foa(spec: Spectrogram) -> None:
    if spec.layout is not AudioLayout.FOA or spec.n_channels != 4:
        raise DspError(
            f"FOA features need a 4-channel spectrogram, got {spec.n_channels} channels",
            code="layout",
        )


def foa_cross_features(spec: Spectrogram) -> np.ndarray:
    """
    Per-bin products with the W channel.

    Returns:
        Real array [frames x bins x 7]: |W|^2, Re/Im(Y conj W), Re/Im(Z conj W),
        Re/Im(X conj W)
    """
    _check_foa(spec)
    w = spec.channel(W)
    w_conj = np.conj(w)
    features = [np.abs(w) ** 2]
    for index in (Y, Z, X):
        product = spec.channel(index) * w_conj
        features.extend([product.real, product.imag])
    return np.stack(features, axis=-1)


def intensity_vector(spec: Spectrogram) -> CueSequence:
    """Horizontal active intensity per frame: i_x, i_y and W-channel energy."""
    cross = foa_cross_features(spec).sum(axis=1)
    energy, iy, ix = cross[:, 0], cross[:, 1], cross[:, 5]
    return CueSequence(frame_times_s=spec.frame_times_s(), ix=ix, iy=iy, energy=energy)


def intensity_azimuth(cues: CueSequence) -> np.ndarray:
    """atan2(i_y, i_x) per frame."""
    if cues.ix is None or cues.iy is None:
        raise DspError("cue sequence carries no intensity vector")
    return np.arctan2(cues.iy, cues.ix)
