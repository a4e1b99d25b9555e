"""
Tests for the HTTP surface.
"""

import httpx
import pytest


@pytest.mark.asyncio
async def test_health(client: httpx.AsyncClient) -> None:
    response = await client.get("/health")
    assert response.status_code == 200
    assert response.json()["status"] == "healthy"


@pytest.mark.asyncio
async def test_single_experiment(client: httpx.AsyncClient) -> None:
    response = await client.post(
        "/api/v1/experiments/single",
        json={"thetas_deg": [44.0], "phis_deg": [0.0, 90.0], "shots": 2000, "seed": 3},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["status"] == "ok"
    assert body["total_count"] == 2
    assert body["metadata"]["command"] == "single"
    assert "X-Run-ID" in response.headers


@pytest.mark.asyncio
async def test_failed_cell_serializes_as_null(client: httpx.AsyncClient) -> None:
    response = await client.post(
        "/api/v1/experiments/single",
        json={"thetas_deg": [0.1], "phis_deg": [0.0], "shots": 100, "mean_source": "measured"},
    )
    assert response.status_code == 200
    assert response.json()["rows"][0]["overlap"] is None


@pytest.mark.asyncio
async def test_two_qubit_experiment(client: httpx.AsyncClient) -> None:
    response = await client.post(
        "/api/v1/experiments/two-qubit",
        json={
            "quadruples": [{"theta1": 45.0, "phi1": 0.0, "theta2": 90.0, "phi2": 0.0}],
            "shots": 2000,
            "visibility": 1.0,
        },
    )
    assert response.status_code == 200
    row = response.json()["rows"][0]
    assert set(row) >= {"F", "F_prime", "P_I", "Ef_I", "Ef_O"}


@pytest.mark.asyncio
async def test_bounds_experiment(client: httpx.AsyncClient) -> None:
    response = await client.post(
        "/api/v1/experiments/bounds",
        json={"thetas_deg": [45.0], "random_maps": 5, "haar_samples": 100},
    )
    assert response.status_code == 200
    body = response.json()
    assert body["rows"][0]["theta"] == 45.0
    assert len(body["haar"]) == 4


@pytest.mark.asyncio
async def test_validation_error_shape(client: httpx.AsyncClient) -> None:
    response = await client.post(
        "/api/v1/experiments/two-qubit",
        json={"quadruples": [{"theta1": 120.0, "theta2": 90.0}]},
        headers={"X-Run-ID": "run-42"},
    )
    assert response.status_code == 422
    body = response.json()
    assert body["error_code"] == "VALIDATION_ERROR"
    assert body["run_id"] == "run-42"
    assert response.headers["X-Run-ID"] == "run-42"


@pytest.mark.asyncio
async def test_unknown_route(client: httpx.AsyncClient) -> None:
    response = await client.get("/api/v1/experiments/nope")
    assert response.status_code in (404, 405)
    assert response.json()["error_code"] == "HTTP_ERROR"
