"""Independent numerical references: shell and sheet integrators, perturbation ODEs, PDE residuals."""

from gravgas.oracles.perturbation import PerturbationRun, perturbation_growth
from gravgas.oracles.residuals import ResidualNorms, residual_check
from gravgas.oracles.sheets import SheetEvent, SheetRun, SheetSystem, sheet_density, sheet_integrate
from gravgas.oracles.shells import ShellEvent, ShellSystem, ShellTrajectory, shell_density, shell_integrate

__all__ = [
    "PerturbationRun", "perturbation_growth", "ResidualNorms", "residual_check",
    "SheetEvent", "SheetRun", "SheetSystem", "sheet_density", "sheet_integrate",
    "ShellEvent", "ShellSystem", "ShellTrajectory", "shell_density", "shell_integrate",
]
