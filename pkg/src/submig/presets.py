"""Built-in three-target experiment presets.

Both presets place small disks of radius 0.05 at (0.4, 0), (-0.6, 0.3) and
(0.1, -0.5) in a unit background.  ``fig2`` uses wavelength 0.4 with uniform
contrasts 5; ``fig3`` uses wavelength 0.2 with contrasts 5, 2 and 7.
"""

from __future__ import annotations

from .scene import FrequencySpec, Inhomogeneity, SceneConfig

__all__ = ["PRESETS", "preset_fig2", "preset_fig3"]

_LOCATIONS = ((0.4, 0.0), (-0.6, 0.3), (0.1, -0.5))
_RADIUS = 0.05


def _scene(contrasts: tuple[float, ...]) -> SceneConfig:
    return SceneConfig(
        inhomogeneities=tuple(
            Inhomogeneity(
                location=loc, radius=_RADIUS, permittivity=c, permeability=c
            )
            for loc, c in zip(_LOCATIONS, contrasts)
        ),
        background_permittivity=1.0,
        background_permeability=1.0,
    )


def preset_fig2() -> tuple[SceneConfig, FrequencySpec]:
    """Uniform-contrast preset: wavelength 0.4, all contrasts 5."""
    return _scene((5.0, 5.0, 5.0)), FrequencySpec.from_wavelength(0.4)


def preset_fig3() -> tuple[SceneConfig, FrequencySpec]:
    """Mixed-contrast preset: wavelength 0.2, contrasts 5, 2, 7."""
    return _scene((5.0, 2.0, 7.0)), FrequencySpec.from_wavelength(0.2)


PRESETS = {"fig2": preset_fig2, "fig3": preset_fig3}
