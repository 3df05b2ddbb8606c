"""Generate demo data files and golden server responses for the dashboard.

Writes:
  fixtures/sphere_ensemble.json    constant-length M=3 ensemble, bounds [0,1]^3
  fixtures/deterministic_table.json  three inputs, each pinned to one point
  frontend/fixtures/meta_sphere.json, slice_sphere.json, meta_table.json,
  marginal_sphere.json, decide_table.json  recorded API responses
"""

import json
from pathlib import Path

import numpy as np
from fastapi.testclient import TestClient

from polarfront import sample_directions
from polarfront.ensembles import FrontEnsemble
from polarfront.serialization import dump_json, ensemble_to_dict, grid_to_dict
from polarfront.service import create_app, session_from_document

ROOT = Path(__file__).resolve().parent.parent


def sphere_doc():
    grid = sample_directions(3, 256, seed=7)
    e = FrontEnsemble(np.zeros(3), grid, np.ones((4, 256)))
    return ensemble_to_dict(
        e, labels=["obj1", "obj2", "obj3"], bounds=([0.0, 0.0, 0.0], [1.0, 1.0, 1.0])
    )


def table_doc():
    pts = np.array([[1.0, 2.0, 1.5], [2.0, 1.0, 1.2], [1.2, 1.2, 2.0]])
    return {
        "inputs": ["x1", "x2", "x3"],
        "samples": np.tile(pts, (6, 1, 1)).tolist(),
        "eta": [0.0, 0.0, 0.0],
        "labels": ["a", "b", "c"],
        "bounds": {"lower": [0.0, 0.0, 0.0], "upper": [2.0, 2.0, 2.0]},
        "grid": grid_to_dict(sample_directions(3, 64, seed=3)),
    }


def main():
    fixtures = ROOT / "fixtures"
    front_fixtures = ROOT / "frontend" / "fixtures"
    fixtures.mkdir(exist_ok=True)
    front_fixtures.mkdir(parents=True, exist_ok=True)

    sphere = sphere_doc()
    table = table_doc()
    dump_json(sphere, fixtures / "sphere_ensemble.json")
    dump_json(table, fixtures / "deterministic_table.json")

    sphere_client = TestClient(create_app(state=session_from_document(sphere)))
    table_client = TestClient(create_app(state=session_from_document(table)))

    (front_fixtures / "meta_sphere.json").write_text(
        json.dumps(sphere_client.get("/meta").json(), indent=2) + "\n"
    )
    (front_fixtures / "slice_sphere.json").write_text(
        json.dumps(
            sphere_client.get(
                "/slice", params={"i": 0, "j": 1, "weights": "0.5,0.5,0.6"}
            ).json(),
            indent=2,
        )
        + "\n"
    )
    (front_fixtures / "marginal_sphere.json").write_text(
        json.dumps(
            sphere_client.get("/marginal", params={"weights": "0.5,0.5,0.5"}).json(), indent=2
        )
        + "\n"
    )
    (front_fixtures / "meta_table.json").write_text(
        json.dumps(table_client.get("/meta").json(), indent=2) + "\n"
    )
    (front_fixtures / "decide_table.json").write_text(
        json.dumps(
            table_client.post("/decide", json={"target": [2.0, 1.0, 1.2]}).json(), indent=2
        )
        + "\n"
    )
    print("fixtures written")


if __name__ == "__main__":
    main()
