"""Synthetic scenes, pretext transforms and dataset generation."""

from .generator import (
    GeneratedExample,
    assign_splits,
    build_example,
    entry_id,
    entry_seed,
    generate_dataset,
    map_examples,
)
from .synth import (
    Scene,
    SceneError,
    add_diffuse_noise,
    encode_foa,
    ild_gains,
    linear_sweep,
    render_binaural,
    render_scene,
    sample_source_signal,
    sample_trajectory,
    synthesize_scene,
    woodworth_itd_s,
)
from .transforms import (
    LayoutError,
    RotationAngle,
    TrainingExample,
    downmix_to_mono,
    flip_stereo,
    joint_mirror,
    make_training_example,
    mirror_trajectory,
    mix_clips,
    rotate_foa,
    rotate_trajectory,
)

__all__ = [
    "GeneratedExample",
    "LayoutError",
    "RotationAngle",
    "Scene",
    "SceneError",
    "TrainingExample",
    "add_diffuse_noise",
    "assign_splits",
    "build_example",
    "downmix_to_mono",
    "encode_foa",
    "entry_id",
    "entry_seed",
    "flip_stereo",
    "generate_dataset",
    "ild_gains",
    "joint_mirror",
    "linear_sweep",
    "make_training_example",
    "map_examples",
    "mirror_trajectory",
    "mix_clips",
    "render_binaural",
    "render_scene",
    "rotate_foa",
    "rotate_trajectory",
    "sample_source_signal",
    "sample_trajectory",
    "synthesize_scene",
    "woodworth_itd_s",
]
