"""
HTTP middleware.

RunContextMiddleware gives every request a run_id (taken from the
``X-Run-ID`` header when present), wraps the request in ``run_context`` so
all log records carry it, and logs the duration of the experiment.
"""

import time
import uuid

from starlette.middleware.base import BaseHTTPMiddleware, RequestResponseEndpoint
from starlette.requests import Request
from starlette.responses import Response

from app.core.context import run_context
from app.core.logging import get_logger

logger = get_logger(__name__)


class RunContextMiddleware(BaseHTTPMiddleware):
    async def dispatch(self, request: Request, call_next: RequestResponseEndpoint) -> Response:
        run_id = request.headers.get("X-Run-ID", uuid.uuid4().hex)
        request.state.run_id = run_id

        with run_context(run_id, path=request.url.path):
            start = time.perf_counter()
            response = await call_next(request)
            logger.info(
                "Request completed",
                extra={
                    "method": request.method,
                    "status_code": response.status_code,
                    "duration_ms": round((time.perf_counter() - start) * 1000, 2),
                },
            )

        response.headers["X-Run-ID"] = run_id
        return response
