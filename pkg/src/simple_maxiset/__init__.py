from .maxiset_lab import MaxisetLab
from .responses import ExperimentResponse
from .models.config_models import ExperimentConfig
from .risk_harness import RiskReport, maxiset_verdict, mc_risk

__all__ = [
    "MaxisetLab",
    "ExperimentResponse",
    "ExperimentConfig",
    "RiskReport",
    "maxiset_verdict",
    "mc_risk",
]
