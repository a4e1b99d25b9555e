"""
Experiment endpoints. They return the rows the CLI writes to CSV.

POST /experiments/single
POST /experiments/two-qubit
POST /experiments/bounds
"""

from fastapi import APIRouter, Depends
from starlette.concurrency import run_in_threadpool

from app.api.dependencies import (
    get_bounds_experiment,
    get_single_qubit_experiment,
    get_two_qubit_experiment,
)
from app.schemas.experiment_schema import (
    BoundsParams,
    BoundsResponse,
    SingleQubitParams,
    SingleQubitResponse,
    TwoQubitParams,
    TwoQubitResponse,
)
from app.services.bounds_service import BoundsExperiment
from app.services.single_qubit_service import SingleQubitExperiment
from app.services.two_qubit_service import TwoQubitExperiment

router = APIRouter(prefix="/experiments", tags=["Experiments"])


@router.post(
    "/single",
    response_model=SingleQubitResponse,
    summary="Orthogonalize single-qubit states on a (θ, φ) grid",
)
async def run_single(
    params: SingleQubitParams,
    experiment: SingleQubitExperiment = Depends(get_single_qubit_experiment),
) -> SingleQubitResponse:
    return await run_in_threadpool(experiment.run, params)


@router.post(
    "/two-qubit",
    response_model=TwoQubitResponse,
    summary="Locally orthogonalize CZ-entangled pairs",
)
async def run_two_qubit(
    params: TwoQubitParams,
    experiment: TwoQubitExperiment = Depends(get_two_qubit_experiment),
) -> TwoQubitResponse:
    return await run_in_threadpool(experiment.run, params)


@router.post(
    "/bounds",
    response_model=BoundsResponse,
    summary="Deterministic bound sweep and Haar benchmark",
)
async def run_bounds(
    params: BoundsParams,
    experiment: BoundsExperiment = Depends(get_bounds_experiment),
) -> BoundsResponse:
    return await run_in_threadpool(experiment.run, params)
