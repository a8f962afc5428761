"""Run configuration: TOML parsing for sweeps, solver knobs, and the
constants table, with a full defaults path when no file is given.
"""

import os
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .grid import WallMode
from .media import ConstantsConfig
from .solver import SolverParams

_DEFAULT_WALLS = (WallMode.DEPOLARIZING, WallMode.NONDEPOLARIZING)


@dataclass(frozen=True)
class RunConfig:
    """Everything needed to reproduce a run.

    Sweep axes are crossed lexicographically in the order detuning, power,
    pressure, beam radius, wall mode.  Temperatures are Celsius here
    (matching how cells are specified) and Kelvin internally.
    """

    constants: ConstantsConfig = ConstantsConfig()
    constants_path: str | None = None
    length_mm: float = 2.0
    radius_mm: float = 1.0
    temperature_c: float = 150.0
    detunings_ghz: tuple = (0.0,)
    powers_mw: tuple = (0.5,)
    pressures_torr: tuple = (200.0,)
    beam_radii_mm: tuple = (1.0,)
    wall_modes: tuple = _DEFAULT_WALLS
    nz: int = 101
    nr: int = 51
    solver: SolverParams = field(default_factory=SolverParams)
    serf_b_tesla: float = 1.0e-9
    serf_optimize: bool = False
    serf_detunings_ghz: tuple | None = None
    output_dir: str = "out"

    def __post_init__(self):
        for name in ("detunings_ghz", "powers_mw", "pressures_torr",
                     "beam_radii_mm", "wall_modes"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"sweep axis {name} must be non-empty")
        if self.temperature_c <= -273.15:
            raise ValueError("temperature below absolute zero")

    @property
    def temperature_k(self):
        return self.temperature_c + 273.15

    @property
    def n_scenes(self):
        return (len(self.detunings_ghz) * len(self.powers_mw)
                * len(self.pressures_torr) * len(self.beam_radii_mm)
                * len(self.wall_modes))

    def echo(self):
        """JSON-serializable snapshot of the effective configuration."""
        return {
            "constants_path": self.constants_path,
            "length_mm": self.length_mm,
            "radius_mm": self.radius_mm,
            "temperature_c": self.temperature_c,
            "detunings_ghz": list(self.detunings_ghz),
            "powers_mw": list(self.powers_mw),
            "pressures_torr": list(self.pressures_torr),
            "beam_radii_mm": list(self.beam_radii_mm),
            "wall_modes": [m.value for m in self.wall_modes],
            "nz": self.nz,
            "nr": self.nr,
            "solver": {
                "outer_tol": self.solver.outer_tol,
                "inner_tol": self.solver.inner_tol,
                "max_outer": self.solver.max_outer,
                "max_inner": self.solver.max_inner,
                "omega_outer": self.solver.omega_outer,
                "sor_omega": self.solver.sor_omega,
            },
            "serf": {
                "b_tesla": self.serf_b_tesla,
                "optimize": self.serf_optimize,
                "detunings_ghz": (None if self.serf_detunings_ghz is None
                                  else list(self.serf_detunings_ghz)),
            },
            "output_dir": self.output_dir,
        }


def load_constants(path):
    """Read a flat TOML coefficient table into a ConstantsConfig."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    return ConstantsConfig.from_mapping(data)


def _parse_wall_modes(values):
    return tuple(WallMode(v) for v in values)


def _take(table, key, default):
    return table[key] if key in table else default


def load_config(path):
    """Parse a TOML run-configuration file; unknown sections or keys fail."""
    with open(path, "rb") as fh:
        data = tomllib.load(fh)
    known_sections = {"constants_file", "cell", "sweep", "grid", "solver",
                      "serf", "output"}
    unknown = set(data) - known_sections
    if unknown:
        raise ValueError(f"unknown config sections/keys: {sorted(unknown)}")

    constants = ConstantsConfig()
    constants_path = None
    if "constants_file" in data:
        constants_path = os.path.join(os.path.dirname(os.path.abspath(path)),
                                      data["constants_file"])
        constants = load_constants(constants_path)

    cell = data.get("cell", {})
    sweep = data.get("sweep", {})
    grid = data.get("grid", {})
    solver_tbl = data.get("solver", {})
    serf = data.get("serf", {})
    output = data.get("output", {})

    defaults = SolverParams()
    solver = SolverParams(
        outer_tol=float(_take(solver_tbl, "outer_tol", defaults.outer_tol)),
        inner_tol=float(_take(solver_tbl, "inner_tol", defaults.inner_tol)),
        max_outer=int(_take(solver_tbl, "max_outer", defaults.max_outer)),
        max_inner=int(_take(solver_tbl, "max_inner", defaults.max_inner)),
        omega_outer=float(_take(solver_tbl, "omega_outer", defaults.omega_outer)),
        sor_omega=(None if _take(solver_tbl, "sor_omega", None) is None
                   else float(solver_tbl["sor_omega"])),
    )

    base = RunConfig()
    serf_detunings = serf.get("detunings_ghz")
    return RunConfig(
        constants=constants,
        constants_path=constants_path,
        length_mm=float(_take(cell, "length_mm", base.length_mm)),
        radius_mm=float(_take(cell, "radius_mm", base.radius_mm)),
        temperature_c=float(_take(cell, "temperature_c", base.temperature_c)),
        detunings_ghz=tuple(float(x) for x in _take(sweep, "detunings_ghz",
                                                    base.detunings_ghz)),
        powers_mw=tuple(float(x) for x in _take(sweep, "powers_mw",
                                                base.powers_mw)),
        pressures_torr=tuple(float(x) for x in _take(sweep, "pressures_torr",
                                                     base.pressures_torr)),
        beam_radii_mm=tuple(float(x) for x in _take(sweep, "beam_radii_mm",
                                                    base.beam_radii_mm)),
        wall_modes=_parse_wall_modes(_take(sweep, "wall_modes",
                                           [m.value for m in base.wall_modes])),
        nz=int(_take(grid, "nz", base.nz)),
        nr=int(_take(grid, "nr", base.nr)),
        solver=solver,
        serf_b_tesla=float(_take(serf, "b_tesla", base.serf_b_tesla)),
        serf_optimize=bool(_take(serf, "optimize", base.serf_optimize)),
        serf_detunings_ghz=(None if serf_detunings is None
                            else tuple(float(x) for x in serf_detunings)),
        output_dir=str(_take(output, "dir", base.output_dir)),
    )
