"""
Route aggregation for API v1.
"""

from fastapi import APIRouter

from app.api.routes.experiments import router as experiments_router

router = APIRouter()
router.include_router(experiments_router)
