"""Named experiment presets (dimensionless parameter columns).

``bmp4``, ``wnt`` and ``nodal`` carry the published dimensionless
reaction/diffusion coefficients; ``instability`` reruns the bmp4 kinetics
with a widened diffusion gap (mu_u = 0.3456, mu_v = 19.008, i.e. physical
1 and 55 um^2/s at colony radius 500 um).
"""

from dataclasses import dataclass

from .kinetics import KineticsParams

SOURCE_LEVEL = 670.0
SOURCE_RADIUS = 0.85

#: Robin transfer rate 172.8 corresponds to H = 0.3456 1/um at L = 500 um.
IMPLIED_TRANSFER_H = 0.3456


@dataclass(frozen=True)
class Preset:
    name: str
    params: KineticsParams
    u0: float
    v0: float
    source_level: float  # 0 disables the activator source
    source_radius: float


PRESETS = {
    "bmp4": Preset(
        name="bmp4",
        params=KineticsParams(
            a=77.76, b=77.76, c=77.76, d=77.76,
            mu_u=3.8, mu_v=19.0, h_u=172.8, h_v=172.8, u_bar=3.0,
        ),
        u0=3.0, v0=0.0, source_level=0.0, source_radius=SOURCE_RADIUS,
    ),
    "wnt": Preset(
        name="wnt",
        params=KineticsParams(
            a=77.76, b=194.4, c=194.4, d=97.2,
            mu_u=3.8, mu_v=19.0, h_u=172.8, h_v=172.8, u_bar=0.0,
        ),
        u0=0.0, v0=0.0, source_level=SOURCE_LEVEL, source_radius=SOURCE_RADIUS,
    ),
    "nodal": Preset(
        name="nodal",
        params=KineticsParams(
            a=31.104, b=77.76, c=77.76, d=38.88,
            mu_u=3.8, mu_v=19.0, h_u=172.8, h_v=172.8, u_bar=0.0,
        ),
        u0=0.0, v0=0.0, source_level=SOURCE_LEVEL, source_radius=SOURCE_RADIUS,
    ),
    "instability": Preset(
        name="instability",
        params=KineticsParams(
            a=77.76, b=77.76, c=77.76, d=77.76,
            mu_u=0.3456, mu_v=19.008, h_u=172.8, h_v=172.8, u_bar=3.0,
        ),
        u0=3.0, v0=0.0, source_level=0.0, source_radius=SOURCE_RADIUS,
    ),
}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}"
        ) from None
