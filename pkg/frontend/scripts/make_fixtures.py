"""Record real session-service payloads as frontend test fixtures.

Drives the canonical ten-unit example through the service in-process and
writes each response body verbatim into tests/fixtures/. Re-run after any
payload-shape change: python scripts/make_fixtures.py
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from codecat.service import create_app

HERE = Path(__file__).resolve().parent
FIXTURES = HERE.parent / "tests" / "fixtures"
PKG_FIXTURES = HERE.parent.parent / "tests" / "fixtures"


def write(name: str, payload) -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / name).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {name}")


def main() -> None:
    client = TestClient(create_app())
    inputs = {
        "categories": json.loads((PKG_FIXTURES / "cookbook_categories.json").read_text()),
        "graph": json.loads((PKG_FIXTURES / "cookbook_graph.json").read_text()),
        "seeds": json.loads((PKG_FIXTURES / "cookbook_seeds.json").read_text()),
    }
    write("session_inputs.json", inputs)

    created = client.post("/sessions", json=inputs)
    assert created.status_code == 201, created.text
    sid = created.json()["id"]
    write("state_initial.json", created.json()["state"])

    propagated = client.post(f"/sessions/{sid}/propagate")
    write("propagate_round1.json", propagated.json())

    write("candidates_round1.json", client.get(f"/sessions/{sid}/candidates").json())

    rejected = client.post(
        f"/sessions/{sid}/assign", json={"unit": "Reader", "category": "0'"}
    )
    assert rejected.status_code == 409
    write("assign_reader_rejected.json", rejected.json())

    assigned = client.post(
        f"/sessions/{sid}/assign", json={"unit": "Reader", "category": "T"}
    )
    assert assigned.status_code == 200
    write("state_after_assign.json", assigned.json())

    propagated2 = client.post(f"/sessions/{sid}/propagate")
    write("propagate_round2.json", propagated2.json())
    write("candidates_round2.json", client.get(f"/sessions/{sid}/candidates").json())

    graph = inputs["graph"]
    write("graph.json", graph)


if __name__ == "__main__":
    main()
