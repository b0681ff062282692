import { describe, expect, it } from "vitest";

import {
  CrossrefTable,
  cycleToggle,
  decodeState,
  encodeState,
  evidenceBody,
  nodeForItem,
  sanitizeState,
  togglableItems,
} from "../src/state.js";

// the case's five items with a route into kercher-bn, as served by /case/crossref
const CROSSREF: CrossrefTable = {
  "18": [
    { model: "chart2", element: "18" },
    { model: "kercher-bn", element: "Characteristics of S knife" },
  ],
  "22": [{ model: "kercher-bn", element: "22, 41 & 43.22" }],
  "40": [{ model: "kercher-bn", element: "40" }],
  "41": [{ model: "kercher-bn", element: "22, 41 & 43.41" }],
  "43": [{ model: "kercher-bn", element: "22, 41 & 43.43" }],
  "25a": [{ model: "chart3", element: "25a" }],
  "11": [{ model: "kercher-ceg", element: "Knife in drawer appeared very clean [11]" }],
};

describe("toggle cycling", () => {
  it("steps unset -> true -> false -> unset", () => {
    expect(cycleToggle(undefined)).toBe("true");
    expect(cycleToggle("true")).toBe("false");
    expect(cycleToggle("false")).toBeUndefined();
  });
});

describe("URL codec", () => {
  it("round-trips a panel state", () => {
    const state = { model: "kercher-bn", toggles: { "41": "true", "18": "false" } as const };
    const query = encodeState(state);
    expect(decodeState(query, "other")).toEqual(state);
  });

  it("encodes deterministically regardless of toggle insertion order", () => {
    const a = encodeState({ model: "m", toggles: { "41": "true", "18": "false" } });
    const b = encodeState({ model: "m", toggles: { "18": "false", "41": "true" } });
    expect(a).toBe(b);
  });

  it("survives item numbers with letters and models with spaces", () => {
    const state = { model: "a net", toggles: { "25a": "true" } as const };
    expect(decodeState(encodeState(state), "x")).toEqual(state);
  });

  it("drops junk parameters and malformed toggle values on decode", () => {
    const state = decodeState("?model=kercher-bn&item.41=yes&utm_source=x&item.43=false", "d");
    expect(state).toEqual({ model: "kercher-bn", toggles: { "43": "false" } });
  });

  it("falls back to the default model for a bare URL", () => {
    expect(decodeState("", "kercher-bn").model).toBe("kercher-bn");
  });
});

describe("crossref routing", () => {
  it("lists exactly the items with a route into the queried network", () => {
    expect(togglableItems(CROSSREF, "kercher-bn")).toEqual(["18", "22", "40", "41", "43"]);
  });

  it("finds the network element for an item", () => {
    expect(nodeForItem(CROSSREF, "kercher-bn", "41")).toBe("22, 41 & 43.41");
    expect(nodeForItem(CROSSREF, "kercher-bn", "25a")).toBeUndefined();
  });

  it("sanitizing removes toggles without a route (the panel invariant)", () => {
    const dirty = {
      model: "kercher-bn",
      toggles: { "41": "true", "25a": "true", "11": "false", nonsense: "true" } as const,
    };
    expect(sanitizeState(dirty, CROSSREF)).toEqual({
      model: "kercher-bn",
      toggles: { "41": "true" },
    });
  });
});

describe("evidence body", () => {
  it("asserts items through 0/1 likelihood vectors on their nodes", () => {
    const state = { model: "kercher-bn", toggles: { "41": "true", "18": "false" } as const };
    expect(evidenceBody(state, CROSSREF, ["S knife used?", "40"])).toEqual({
      soft: {
        "22, 41 & 43.41": [1, 0],
        "Characteristics of S knife": [0, 1],
      },
      nodes: ["S knife used?", "40"],
    });
  });

  it("sends no evidence when nothing is toggled", () => {
    expect(evidenceBody({ model: "m", toggles: {} }, CROSSREF, ["40"])).toEqual({
      soft: {},
      nodes: ["40"],
    });
  });

  it("combines contradictory assertions on one node into a zero vector for the service to refuse", () => {
    const crossref: CrossrefTable = {
      a: [{ model: "m", element: "X" }],
      b: [{ model: "m", element: "X" }],
    };
    const state = { model: "m", toggles: { a: "true", b: "false" } as const };
    expect(evidenceBody(state, crossref, []).soft).toEqual({ X: [0, 0] });
  });
});
