import { describe, expect, it } from "vitest";

import { SequenceTracker } from "../src/tracker.js";

describe("SequenceTracker", () => {
  it("accepts only the newest issued sequence", () => {
    const t = new SequenceTracker();
    const a = t.begin();
    const b = t.begin();
    expect(t.current(a)).toBe(false);
    expect(t.current(b)).toBe(true);
  });

  it("rejects an old sequence even after the newer one resolved", () => {
    const t = new SequenceTracker();
    const a = t.begin();
    const b = t.begin();
    expect(t.current(b)).toBe(true);
    expect(t.current(a)).toBe(false); // late arrival of the first response
  });

  it("keeps accepting the newest until another request starts", () => {
    const t = new SequenceTracker();
    const a = t.begin();
    expect(t.current(a)).toBe(true);
    expect(t.current(a)).toBe(true);
    t.begin();
    expect(t.current(a)).toBe(false);
  });
});
