"""Record the chain-KB session protocol for the UI round-trip test.

Drives the real service through a complete session (per-axiom answers in
presentation order, as the UI submits them for an expert who knows axiom 1
is the bug) and dumps every request/response pair to
tests/fixtures/chain_session.json. Run from frontend/:

    python3 tests/record_fixture.py

The reference numbers are asserted against the engine before anything is
written, so a stale fixture cannot pass the round-trip test silently.
"""

import json
from pathlib import Path

from fastapi.testclient import TestClient

from oracle_loop.experts import ExpertProfile, TargetDiagnosis
from oracle_loop.kb import parse_kb
from oracle_loop.queries import Heuristic
from oracle_loop.service import create_app
from oracle_loop.session import QueryType, SessionConfig, run_auto_session

CHAIN_KB = "[K]\na -> x\nx -> y\ny -> b\n[B]\na\n[N]\nb\n"
FAULTY = {1}
CONFIG = {"queryType": "sq", "heuristic": "spl", "leadingCap": 9}

reference = run_auto_session(
    parse_kb(CHAIN_KB),
    SessionConfig(query_type=QueryType.SQ, heuristic=Heuristic.SPL),
    ExpertProfile.PRAGMATIST,
    TargetDiagnosis(frozenset(FAULTY)),
)
assert sorted(reference.final_diagnosis.axiom_ids) == sorted(FAULTY)

exchanges = []
client = TestClient(create_app(ui_dir="/nonexistent"))


def call(method, path, body=None):
    response = client.request(method, path, json=body)
    exchanges.append(
        {
            "request": {"method": method, "path": path, "body": body},
            "response": {"status": response.status_code, "body": response.json()},
        }
    )
    return response.json()


snapshot = call("POST", "/sessions", {"kbText": CHAIN_KB, "config": CONFIG})
sid = snapshot["sessionId"]
while True:
    query = call("GET", f"/sessions/{sid}/query")
    if query["finished"]:
        break
    # pragmatist labels in presentation order: through the first false
    labels = []
    for axiom in query["query"]:
        value = axiom["id"] not in FAULTY
        labels.append([axiom["id"], value])
        if not value:
            break
    snapshot = call("POST", f"/sessions/{sid}/answer", {"labels": labels})
final = call("GET", f"/sessions/{sid}/state")

assert final["finished"]
assert final["result"]["axiomIds"] == sorted(FAULTY)
assert final["metrics"]["numQueries"] == reference.metrics.num_queries
assert final["metrics"]["numAxioms"] == reference.metrics.num_axioms

fixture = {
    "kbText": CHAIN_KB,
    "config": CONFIG,
    "expected": {
        "resultAxioms": final["result"]["axioms"],
        "numQueries": reference.metrics.num_queries,
        "numAxioms": reference.metrics.num_axioms,
    },
    "exchanges": exchanges,
}
out = Path(__file__).parent / "fixtures" / "chain_session.json"
out.parent.mkdir(exist_ok=True)
out.write_text(json.dumps(fixture, indent=2) + "\n")
print(f"recorded {len(exchanges)} exchanges to {out}")
print(f"final diagnosis {final['result']['axioms']}, "
      f"#Q={final['metrics']['numQueries']} #Ax={final['metrics']['numAxioms']}")
