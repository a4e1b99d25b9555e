"""
Shared FastAPI dependencies, injected into route handlers.
"""

from fastapi import Depends

from app.config import Settings, get_settings
from app.services.bounds_service import BoundsExperiment
from app.services.single_qubit_service import SingleQubitExperiment
from app.services.two_qubit_service import TwoQubitExperiment


def get_single_qubit_experiment(
    settings: Settings = Depends(get_settings),
) -> SingleQubitExperiment:
    return SingleQubitExperiment(settings)


def get_two_qubit_experiment(
    settings: Settings = Depends(get_settings),
) -> TwoQubitExperiment:
    return TwoQubitExperiment(settings)


def get_bounds_experiment(
    settings: Settings = Depends(get_settings),
) -> BoundsExperiment:
    return BoundsExperiment(settings)
