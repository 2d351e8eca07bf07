"""Flat key-value experiment configuration.

The format is line-oriented: optional ``[section]`` headers (``mesh``,
``params``, ``schedule``, ``output``), ``key = value`` pairs, ``#``
comments, and blank lines. A top-level ``preset = <name>`` pulls in a full
named parameter column; explicit keys override it. Unknown keys and
malformed values are rejected with the offending line number.
"""

from dataclasses import dataclass, field, replace

from .errors import ConfigError
from .kinetics import KineticsParams
from .presets import PRESETS, SOURCE_RADIUS, get_preset

SECTIONS = ("mesh", "params", "schedule", "output")

#: section -> key -> (type, allow_zero). Floats marked allow_zero=False
#: must be strictly positive.
_SCHEMA = {
    "": {"preset": (str, True)},
    "mesh": {
        "radius": (float, False),
        "target_h": (float, False),
    },
    "params": {
        "a": (float, False),
        "b": (float, False),
        "c": (float, False),
        "d": (float, False),
        "mu_u": (float, False),
        "mu_v": (float, False),
        "h_u": (float, True),
        "h_v": (float, True),
        "u_bar": (float, True),
        "u0": (float, True),
        "v0": (float, True),
        "source_level": (float, True),
        "source_radius": (float, False),
    },
    "schedule": {
        "dt": (float, False),
        "t_end": (float, False),
        "tcut": (float, True),
    },
    "output": {
        "dir": (str, True),
        "diagnostics_every": (int, False),
        "n_bins": (int, False),
        "snapshots": (int, False),
        "integrator": (str, True),
        "boundary": (str, True),
    },
}

_REQUIRED_WITHOUT_PRESET = ("params.a", "params.b", "params.c", "params.d",
                            "params.mu_u", "params.mu_v")

PRESET_PROVENANCE = "preset"
CONFIG_PROVENANCE = "config"
DEFAULT_PROVENANCE = "default"


@dataclass
class ExperimentSpec:
    """Fully resolved experiment description.

    ``provenance`` maps each resolved key to where its value came from
    (``"config"``, ``"preset"`` or ``"default"``).
    """

    params: KineticsParams
    preset: str = ""
    radius: float = 1.0
    target_h: float = 0.02
    dt: float = 1e-4
    t_end: float = 3.0
    tcut: float = None
    u0: float = 0.0
    v0: float = 0.0
    source_level: float = 0.0
    source_radius: float = SOURCE_RADIUS
    out_dir: str = "out"
    diagnostics_every: int = 10
    n_bins: int = 30
    snapshots: int = 16
    integrator: str = "imex"
    boundary: str = "robin"
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.integrator not in ("imex", "explicit"):
            raise ConfigError(f"unknown integrator {self.integrator!r}")
        if self.boundary not in ("robin", "dirichlet"):
            raise ConfigError(f"unknown boundary mode {self.boundary!r}")
        if self.tcut is not None and not 0.0 <= self.tcut <= self.t_end:
            raise ConfigError("tcut must lie within [0, t_end]")

    def with_overrides(self, **kwargs):
        """Copy with keyword overrides (None values are ignored)."""
        updates = {k: v for k, v in kwargs.items() if v is not None}
        spec = replace(self, **updates)
        spec.provenance = dict(self.provenance)
        spec.provenance.update({k: CONFIG_PROVENANCE for k in updates})
        return spec


def _coerce(raw, typ, lineno, key):
    if typ is str:
        return raw.strip("\"'")
    try:
        if typ is int:
            val = int(raw)
        else:
            val = float(raw)
    except ValueError:
        raise ConfigError(
            f"line {lineno}: non-numeric value {raw!r} for key {key!r}"
        ) from None
    return val


def _parse_lines(text):
    """Yield (lineno, section, key, raw_value) with schema lookups applied."""
    section = ""
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip().lower()
            if section not in SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section [{section}]")
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        key_section = section
        if "." in key:
            # dotted form: "params.a = 77.76" works outside its section
            prefix, key = key.split(".", 1)
            if prefix not in SECTIONS:
                raise ConfigError(f"line {lineno}: unknown section {prefix!r}")
            key_section = prefix
        schema = _SCHEMA.get(key_section, {})
        if key not in schema:
            where = f"[{key_section}]" if key_section else "top level"
            raise ConfigError(f"line {lineno}: unknown key {key!r} in {where}")
        yield lineno, key_section, key, raw


def parse_config(text):
    """Parse config text into a validated :class:`ExperimentSpec`.

    Raises
    ------
    ConfigError
        On unknown keys/sections, non-numeric values, nonpositive
        coefficients, or a missing parameter set; messages carry the
        offending line number.
    """
    values = {}
    linenos = {}
    for lineno, section, key, raw in _parse_lines(text):
        typ, allow_zero = _SCHEMA[section][key]
        val = _coerce(raw, typ, lineno, key)
        if typ in (int, float) and (val < 0 or (val == 0 and not allow_zero)):
            bound = "nonnegative" if allow_zero else "positive"
            raise ConfigError(f"line {lineno}: {key} must be {bound}, got {val}")
        full = f"{section}.{key}" if section else key
        values[full] = val
        linenos[full] = lineno

    provenance = {}
    preset_name = values.pop("preset", "")
    if preset_name:
        if preset_name not in PRESETS:
            raise ConfigError(
                f"line {linenos['preset']}: unknown preset {preset_name!r}; "
                f"available: {', '.join(sorted(PRESETS))}"
            )
        preset = get_preset(preset_name)
        base = {
            "params.a": preset.params.a, "params.b": preset.params.b,
            "params.c": preset.params.c, "params.d": preset.params.d,
            "params.mu_u": preset.params.mu_u, "params.mu_v": preset.params.mu_v,
            "params.h_u": preset.params.h_u, "params.h_v": preset.params.h_v,
            "params.u_bar": preset.params.u_bar,
            "params.u0": preset.u0, "params.v0": preset.v0,
            "params.source_level": preset.source_level,
            "params.source_radius": preset.source_radius,
        }
        for key, val in base.items():
            if key not in values:
                values[key] = val
                provenance[key] = PRESET_PROVENANCE
    else:
        missing = [k for k in _REQUIRED_WITHOUT_PRESET if k not in values]
        if missing:
            raise ConfigError(
                "no preset given and required keys missing: "
                + ", ".join(missing)
            )

    def take(full, default):
        if full in values:
            provenance.setdefault(full, CONFIG_PROVENANCE)
            return values.pop(full)
        provenance[full] = DEFAULT_PROVENANCE
        return default

    try:
        params = KineticsParams(
            a=values.pop("params.a"), b=values.pop("params.b"),
            c=values.pop("params.c"), d=values.pop("params.d"),
            mu_u=values.pop("params.mu_u"), mu_v=values.pop("params.mu_v"),
            h_u=take("params.h_u", 0.0), h_v=take("params.h_v", 0.0),
            u_bar=take("params.u_bar", 0.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    for key in ("params.a", "params.b", "params.c", "params.d",
                "params.mu_u", "params.mu_v"):
        provenance.setdefault(key, CONFIG_PROVENANCE)

    spec = ExperimentSpec(
        params=params,
        preset=preset_name,
        radius=take("mesh.radius", 1.0),
        target_h=take("mesh.target_h", 0.02),
        dt=take("schedule.dt", 1e-4),
        t_end=take("schedule.t_end", 3.0),
        tcut=take("schedule.tcut", None),
        u0=take("params.u0", 0.0),
        v0=take("params.v0", 0.0),
        source_level=take("params.source_level", 0.0),
        source_radius=take("params.source_radius", SOURCE_RADIUS),
        out_dir=take("output.dir", "out"),
        diagnostics_every=take("output.diagnostics_every", 10),
        n_bins=take("output.n_bins", 30),
        snapshots=take("output.snapshots", 16),
        integrator=take("output.integrator", "imex"),
        boundary=take("output.boundary", "robin"),
        provenance=provenance,
    )
    return spec


def dump_config(spec):
    """Render a spec back to config text (round-trips through parse_config)."""
    p = spec.params
    lines = []
    if spec.preset:
        lines.append(f"preset = {spec.preset}")
    lines += [
        "[mesh]",
        f"radius = {spec.radius!r}",
        f"target_h = {spec.target_h!r}",
        "[params]",
        f"a = {p.a!r}", f"b = {p.b!r}", f"c = {p.c!r}", f"d = {p.d!r}",
        f"mu_u = {p.mu_u!r}", f"mu_v = {p.mu_v!r}",
        f"h_u = {p.h_u!r}", f"h_v = {p.h_v!r}", f"u_bar = {p.u_bar!r}",
        f"u0 = {spec.u0!r}", f"v0 = {spec.v0!r}",
        f"source_level = {spec.source_level!r}",
        f"source_radius = {spec.source_radius!r}",
        "[schedule]",
        f"dt = {spec.dt!r}",
        f"t_end = {spec.t_end!r}",
    ]
    if spec.tcut is not None:
        lines.append(f"tcut = {spec.tcut!r}")
    lines += [
        "[output]",
        f"dir = {spec.out_dir}",
        f"diagnostics_every = {spec.diagnostics_every}",
        f"n_bins = {spec.n_bins}",
        f"snapshots = {spec.snapshots}",
        f"integrator = {spec.integrator}",
        f"boundary = {spec.boundary}",
    ]
    return "\n".join(lines) + "\n"
