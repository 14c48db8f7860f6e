"""Exact boundary harmonic analysis on free groups and free products."""

try:
    from . import _hyplab as _core  # installed wheel: extension inside the package
except ImportError:
    import _hyplab as _core  # build tree: extension next to the package dir

__version__ = "0.1.0"

__all__ = [
    "AhlforsReport",
    "AnnulusAverage",
    "ConformalityReport",
    "CsPoissonReport",
    "Density",
    "Direction",
    "Error",
    "FatouEnvelope",
    "FatouTrace",
    "Group",
    "RdSumReport",
    "RdSumRow",
    "StepFunction",
    "annulus_average",
    "busemann",
    "check_cs_poisson",
    "fatou_experiment",
    "harish_chandra",
    "harish_chandra_radial",
    "l2_norm",
    "normalized_poisson",
    "rd_sum",
]

AhlforsReport = _core.AhlforsReport
AnnulusAverage = _core.AnnulusAverage
ConformalityReport = _core.ConformalityReport
CsPoissonReport = _core.CsPoissonReport
Density = _core.Density
Direction = _core.Direction
Error = _core.Error
FatouEnvelope = _core.FatouEnvelope
FatouTrace = _core.FatouTrace
Group = _core.Group
RdSumReport = _core.RdSumReport
RdSumRow = _core.RdSumRow
StepFunction = _core.StepFunction
annulus_average = _core.annulus_average
busemann = _core.busemann
check_cs_poisson = _core.check_cs_poisson
fatou_experiment = _core.fatou_experiment
harish_chandra = _core.harish_chandra
harish_chandra_radial = _core.harish_chandra_radial
l2_norm = _core.l2_norm
normalized_poisson = _core.normalized_poisson
rd_sum = _core.rd_sum
