/** Evidence-panel state and its URL encoding.
 *
 * The whole panel is reconstructible from the query string, so a what-if
 * scenario is a shareable link:
 *
 *     ?model=kercher-bn&item.18=false&item.41=true
 *
 * Toggles exist only for items the cross-reference table routes to a node
 * of the queried network; anything else in the URL is dropped on decode.
 */

import type { CrossrefEntry, EvidenceBody } from "./api.js";

export type Toggle = "true" | "false";

export interface PanelState {
  model: string;
  /** item number -> asserted value; an unset item is simply absent */
  toggles: Record<string, Toggle>;
}

export type CrossrefTable = Record<string, CrossrefEntry[]>;

/** unset -> asserted true -> asserted false -> unset */
export function cycleToggle(current: Toggle | undefined): Toggle | undefined {
  if (current === undefined) return "true";
  return current === "true" ? "false" : undefined;
}

export function encodeState(state: PanelState): string {
  const q = new URLSearchParams();
  q.set("model", state.model);
  for (const item of Object.keys(state.toggles).sort()) {
    q.set(`item.${item}`, state.toggles[item]);
  }
  return q.toString();
}

export function decodeState(query: string, fallbackModel: string): PanelState {
  const q = new URLSearchParams(query);
  const state: PanelState = { model: q.get("model") ?? fallbackModel, toggles: {} };
  for (const [key, value] of q.entries()) {
    if (!key.startsWith("item.")) continue;
    if (value === "true" || value === "false") state.toggles[key.slice("item.".length)] = value;
  }
  return state;
}

/** The node a toggled item asserts, per the case's cross-reference table. */
export function nodeForItem(crossref: CrossrefTable, model: string, item: string): string | undefined {
  for (const entry of crossref[item] ?? []) {
    if (entry.model === model) return entry.element;
  }
  return undefined;
}

/** Items that may carry a toggle: those with a cross-reference into the queried network. */
export function togglableItems(crossref: CrossrefTable, model: string): string[] {
  return Object.keys(crossref)
    .filter((item) => nodeForItem(crossref, model, item) !== undefined)
    .sort((a, b) => a.localeCompare(b, undefined, { numeric: true }));
}

/** Drop toggles that the cross-reference table cannot route to the queried network. */
export function sanitizeState(state: PanelState, crossref: CrossrefTable): PanelState {
  const toggles: Record<string, Toggle> = {};
  for (const [item, value] of Object.entries(state.toggles)) {
    if (nodeForItem(crossref, state.model, item) !== undefined) toggles[item] = value;
  }
  return { model: state.model, toggles };
}

/** The infer request for a panel state.
 *
 * An asserted item pins its node through a 0/1 likelihood vector —
 * `[1, 0]` reads "the first (affirmative) state holds", `[0, 1]` the
 * negation — which works for any two-state node without the client
 * knowing state names. Two items asserting the same node combine by
 * elementwise AND; contradictions become an all-zero vector, which the
 * service reports as impossible evidence.
 */
export function evidenceBody(state: PanelState, crossref: CrossrefTable, watched: string[]): EvidenceBody {
  const soft: Record<string, number[]> = {};
  for (const item of Object.keys(state.toggles).sort()) {
    const node = nodeForItem(crossref, state.model, item);
    if (node === undefined) continue;
    const vector = state.toggles[item] === "true" ? [1, 0] : [0, 1];
    const prior = soft[node];
    soft[node] = prior === undefined ? vector : prior.map((w, i) => w && vector[i]);
  }
  return { soft, nodes: watched };
}
