"""Unit conversion between physical and dimensionless parameter sets.

Physical parameters live in (um, sec) units; the dimensionless system uses
the colony radius ``L`` as the length unit and ``tau`` (one day by default)
as the time unit, via x -> L*x, t -> tau*t, u -> u_ref*u, v -> v_ref*v.
The coefficient map is

    a = lambda_a * tau        mu_u = mu_a * tau / L**2     h_u = H_a * L
    c = lambda_i * tau        mu_v = mu_i * tau / L**2     h_v = H_i * L
    b = k_a * tau             d = k_i * tau                u_bar -> u_bar / u_ref

Since all four reaction coefficients scale by the same ``tau``, the
phase-plane regime type is invariant under the conversion.
"""

from dataclasses import dataclass

from .kinetics import KineticsParams

#: Default time unit: one day, in seconds.
DAY_SECONDS = 86400.0

#: Default colony radius in micrometers.
DEFAULT_RADIUS_UM = 500.0


@dataclass(frozen=True)
class PhysicalParams:
    """Dimensional parameters in micrometers and seconds.

    Attributes
    ----------
    mu_a, mu_i : float
        Activator/inhibitor diffusion coefficients (um^2/sec).
    lambda_a, lambda_i : float
        Decay rates (1/sec).
    k_a, k_i : float
        Reaction (production) rates (1/sec).
    H_a, H_i : float
        Boundary transfer coefficients (1/um).
    L : float
        Colony radius (um), the length unit of the dimensionless system.
    tau : float
        Time unit (sec); one day by default.
    u_bar : float
        Background activator concentration on the boundary, in units of
        ``u_ref`` (the inhibitor background is zero).
    u_ref, v_ref : float
        Reference concentrations; their ratio is recorded but the
        coefficient map assumes u_ref/v_ref = 1.
    """

    mu_a: float
    mu_i: float
    lambda_a: float
    lambda_i: float
    k_a: float
    k_i: float
    H_a: float = 0.0
    H_i: float = 0.0
    L: float = DEFAULT_RADIUS_UM
    tau: float = DAY_SECONDS
    u_bar: float = 0.0
    u_ref: float = 1.0
    v_ref: float = 1.0

    def __post_init__(self):
        for name in ("mu_a", "mu_i", "lambda_a", "lambda_i", "k_a", "k_i",
                     "L", "tau", "u_ref", "v_ref"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        for name in ("H_a", "H_i", "u_bar"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    @property
    def ref_ratio(self):
        """Concentration reference ratio u_ref/v_ref (1 in the presets)."""
        return self.u_ref / self.v_ref


def nondimensionalize(p):
    """Map :class:`PhysicalParams` to dimensionless :class:`KineticsParams`."""
    scale = p.tau / p.L**2
    return KineticsParams(
        a=p.lambda_a * p.tau,
        b=p.k_a * p.tau,
        c=p.lambda_i * p.tau,
        d=p.k_i * p.tau,
        mu_u=p.mu_a * scale,
        mu_v=p.mu_i * scale,
        h_u=p.H_a * p.L,
        h_v=p.H_i * p.L,
        u_bar=p.u_bar / p.u_ref,
    )


def dimensionalize(k, L=DEFAULT_RADIUS_UM, tau=DAY_SECONDS, u_ref=1.0, v_ref=1.0):
    """Exact inverse of :func:`nondimensionalize` for given units.

    Round-trips with :func:`nondimensionalize` to better than 1e-12
    relative error (the map is a componentwise multiplication).
    """
    if L <= 0 or tau <= 0:
        raise ValueError("L and tau must be positive")
    scale = L**2 / tau
    return PhysicalParams(
        mu_a=k.mu_u * scale,
        mu_i=k.mu_v * scale,
        lambda_a=k.a / tau,
        lambda_i=k.c / tau,
        k_a=k.b / tau,
        k_i=k.d / tau,
        H_a=k.h_u / L,
        H_i=k.h_v / L,
        L=L,
        tau=tau,
        u_bar=k.u_bar * u_ref,
        u_ref=u_ref,
        v_ref=v_ref,
    )
