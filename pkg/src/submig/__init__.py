"""Subspace-migration imaging of small scatterers from multistatic far-field data.

Pipeline: describe a scene (:mod:`submig.scene`), synthesize the multistatic
response matrix (:mod:`submig.forward`), decompose it (:mod:`submig.spectral`),
migrate onto a grid (:mod:`submig.imaging`), and check the result against the
closed-form Bessel prediction (:mod:`submig.analytic`).
"""

from .analytic import (
    BesselEvaluator,
    analytic_image_grid,
    analytic_image_value,
    bessel_j0,
    bessel_j1,
    predict_peaks,
    quadrature_identity_check,
)
from .forward import (
    MSRMatrix,
    add_noise,
    assemble_msr,
    build_E_matrix,
    farfield_entry,
    read_msr,
    write_msr,
)
from .imaging import (
    ImageMap,
    ImagingGridSpec,
    Peak,
    extract_peaks,
    image_grid,
    imaging_value,
    read_image,
    test_vector,
    write_image,
    write_peaks,
)
from .presets import PRESETS, preset_fig2, preset_fig3
from .scene import (
    DirectionSet,
    FrequencySpec,
    Inhomogeneity,
    SceneConfig,
    load_scene,
    make_directions,
    validate_scene,
)
from .spectral import ComputationError, SpectralFactors, decompose, select_rank

__version__ = "0.1.0"

__all__ = [
    "BesselEvaluator",
    "ComputationError",
    "DirectionSet",
    "FrequencySpec",
    "ImageMap",
    "ImagingGridSpec",
    "Inhomogeneity",
    "MSRMatrix",
    "PRESETS",
    "Peak",
    "SceneConfig",
    "SpectralFactors",
    "add_noise",
    "analytic_image_grid",
    "analytic_image_value",
    "assemble_msr",
    "bessel_j0",
    "bessel_j1",
    "build_E_matrix",
    "decompose",
    "extract_peaks",
    "farfield_entry",
    "image_grid",
    "imaging_value",
    "load_scene",
    "make_directions",
    "predict_peaks",
    "preset_fig2",
    "preset_fig3",
    "quadrature_identity_check",
    "read_image",
    "read_msr",
    "select_rank",
    "test_vector",
    "validate_scene",
    "write_image",
    "write_msr",
    "write_peaks",
]
