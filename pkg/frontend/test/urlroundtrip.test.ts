import { describe, expect, it } from "vitest";

import { Client } from "../src/api.js";
import { PosteriorPanel, PosteriorView } from "../src/posterior.js";
import { CrossrefTable, decodeState, encodeState, evidenceBody, sanitizeState } from "../src/state.js";
import { routedFetch } from "./fakes.js";

// captured from the real service: soft-asserting item 41's node, watching the probandum nodes
const SOFT_41 =
  '{"marginals":{"40":[0.8181818181818181,0.18181818181818182],"S knife used?":[0.49999999999999994,0.5]},"evidence_probability":0.55}';

const CROSSREF: CrossrefTable = {
  "41": [{ model: "kercher-bn", element: "22, 41 & 43.41" }],
  "18": [{ model: "kercher-bn", element: "Characteristics of S knife" }],
};

const WATCHED = ["S knife used?", "40"];

function displayed(view: PosteriorView): string[] {
  if (view.kind !== "bars") throw new Error(`expected bars, got ${view.kind}`);
  return [...view.nodes.flatMap((nb) => nb.entries.map((e) => e.text)), view.evidenceText];
}

describe("URL round-trip", () => {
  it("reloading from the query string reproduces identical displayed numbers", async () => {
    // the service is a pure function of the request body, as statelessness guarantees
    const seen: string[] = [];
    const fetchImpl = routedFetch((_url, _method, body) => {
      seen.push(body ?? "");
      return { status: 200, raw: SOFT_41 };
    });

    const before = { model: "kercher-bn", toggles: { "41": "true" } as const };
    const panelBefore = new PosteriorPanel(new Client(fetchImpl), before.model, WATCHED);
    await panelBefore.refresh(evidenceBody(before, CROSSREF, WATCHED));
    const numbersBefore = displayed(panelBefore.view);

    // share the link, "reload": decode the query string into a fresh panel
    const url = `?${encodeState(before)}`;
    const after = sanitizeState(decodeState(url, "kercher-bn"), CROSSREF);
    expect(after).toEqual(before);

    const panelAfter = new PosteriorPanel(new Client(fetchImpl), after.model, WATCHED);
    await panelAfter.refresh(evidenceBody(after, CROSSREF, WATCHED));

    expect(seen[0]).toBe(seen[1]); // byte-identical requests…
    expect(displayed(panelAfter.view)).toEqual(numbersBefore); // …and byte-identical numbers
    expect(numbersBefore).toEqual([
      "0.49999999999999994",
      "0.5",
      "0.8181818181818181",
      "0.18181818181818182",
      "0.55",
    ]);
  });
});
