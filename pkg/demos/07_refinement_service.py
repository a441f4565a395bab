"""
The refinement service over the wire
====================================

The HTTP relay accepts {answer, comments[], question}, runs the editing
pipeline against the configured provider, and answers with the schema-v1
result. Here it runs in-process against a canned provider; in production,
point `provider.endpoint` at a real chat-completions backend and start it
with `autocombat serve --config service.conf`.
"""

import json

from fastapi.testclient import TestClient

from autocombat.providers import DecodingParams
from autocombat.service import ServiceConfig, create_app


class CannedProvider:
    name = "canned"
    model = "canned"
    decoding = DecodingParams()

    def complete(self, system_text: str, user_text: str) -> str:
        return json.dumps(
            {
                "concerns": ["flag deprecated API"],
                "used_question": False,
                "change_log": [{"concern": "flag deprecated API", "change": "named the replacement"}],
                "improved_answer": "Call getInstanceId(); getToken() was deprecated.",
            }
        )


config = ServiceConfig(provider_endpoint="in-process", allowed_origins=("chrome-extension://demo",))
client = TestClient(create_app(config, provider=CannedProvider()))

print("GET /healthz ->", client.get("/healthz").json())

body = {
    "answer": "Call getToken() to fetch the registration token.",
    "comments": [{"author": "sam", "body": "getToken() was deprecated, use getInstanceId()"}],
    "question": "How do I fetch the FCM registration token?",
}
response = client.post("/refine", json=body)
print(f"\nPOST /refine -> {response.status_code}")
print(json.dumps(response.json(), indent=2))

bad = client.post("/refine", json={"comments": []})
print(f"\nPOST /refine with missing fields -> {bad.status_code}: {bad.json()}")
