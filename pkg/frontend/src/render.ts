/** HTML renderers: view models in, markup strings out.
 *
 * Pure functions so tests can assert on the markup without a DOM. Event
 * wiring happens in main.ts through data- attributes.
 */

import type { CaseItem } from "./api.js";
import type { CegView } from "./ceg.js";
import type { PosteriorView } from "./posterior.js";
import type { PanelState, Toggle } from "./state.js";
import type { ChainsView, RelevanceView } from "./wigmore.js";

export function escapeHtml(s: string): string {
  return s
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

const TOGGLE_LABEL: Record<Toggle | "unset", string> = {
  unset: "—",
  true: "asserted true",
  false: "asserted false",
};

export function renderToggles(items: CaseItem[], togglable: string[], state: PanelState): string {
  const byNumber = new Map(items.map((it) => [it.number, it]));
  const rows = togglable.map((number) => {
    const item = byNumber.get(number);
    const value = state.toggles[number] ?? "unset";
    return `<li class="toggle ${value}">
      <button type="button" data-toggle-item="${escapeHtml(number)}">${escapeHtml(number)}</button>
      <span class="assertion">${TOGGLE_LABEL[value]}</span>
      <span class="text">${escapeHtml(item?.text ?? "")}</span>
    </li>`;
  });
  return `<ul class="toggles">${rows.join("")}</ul>`;
}

export function renderPosterior(view: PosteriorView): string {
  switch (view.kind) {
    case "pending":
      return `<p class="pending">querying…</p>`;
    case "impossible":
      return `<p class="banner impossible">The asserted evidence is impossible under this model: ${escapeHtml(view.message)}</p>`;
    case "error":
      return `<p class="banner error">${escapeHtml(view.error)}: ${escapeHtml(view.message)}</p>`;
    case "bars": {
      const nodes = view.nodes.map((nb) => {
        const bars = nb.entries.map(
          (e) => `<div class="bar-row">
            <span class="bar" style="width:${(e.value * 100).toFixed(1)}%"></span>
            <code class="prob" data-node="${escapeHtml(nb.node)}" data-state-index="${e.index}">${escapeHtml(e.text)}</code>
          </div>`,
        );
        return `<div class="node-bars"><h4>${escapeHtml(nb.node)}</h4>${bars.join("")}</div>`;
      });
      return `${nodes.join("")}
        <p class="evidence-mass">evidence probability <code class="prob" data-field="evidence_probability">${escapeHtml(view.evidenceText)}</code></p>`;
    }
  }
}

export function renderCeg(view: CegView): string {
  switch (view.kind) {
    case "pending":
      return `<p class="pending">loading storylines…</p>`;
    case "no-paths":
      return `<p class="banner impossible">No storyline survives: ${escapeHtml(view.message)}</p>
        <button type="button" data-ceg-back>back</button>`;
    case "error":
      return `<p class="banner error">${escapeHtml(view.error)}: ${escapeHtml(view.message)}</p>
        <button type="button" data-ceg-back>back</button>`;
    case "paths": {
      const rows = view.rows.map((row) => {
        const labels = row.labels
          .map((l) => `<button type="button" class="edge" data-ceg-label="${escapeHtml(l)}">${escapeHtml(l)}</button>`)
          .join(`<span class="sep"> / </span>`);
        return `<li><code class="prob">${escapeHtml(row.text)}</code> ${labels}</li>`;
      });
      const back = view.depth > 0 ? `<button type="button" data-ceg-back>back</button>` : "";
      return `<h4>${escapeHtml(view.title)} ${back}</h4>
        <p class="mass">mass <code class="prob" data-field="mass">${escapeHtml(view.massText)}</code></p>
        <ol class="paths">${rows.join("")}</ol>`;
    }
  }
}

export function renderRelevance(view: RelevanceView, chains?: ChainsView): string {
  if (view.empty) return `<p class="empty">This chart has no items beyond its probandum.</p>`;
  const node = (id: string) =>
    `<button type="button" class="chart-node" data-chain-node="${escapeHtml(id)}">${escapeHtml(id)}</button>`;
  const chainBlock =
    chains === undefined
      ? ""
      : `<div class="chains"><h5>chains from ${escapeHtml(chains.node)}</h5>${
          chains.lines.length === 0
            ? `<p class="empty">no argument chain reaches the probandum</p>`
            : `<ul>${chains.lines
                .map(
                  (line, i) =>
                    `<li class="chain ${escapeHtml(chains.terminal[i] ?? "")}"><code>${escapeHtml(line)}</code></li>`,
                )
                .join("")}</ul>`
        }</div>`;
  return `<p class="probandum">probandum: <strong>${escapeHtml(view.probandum)}</strong></p>
    <div class="tray relevant"><h5>bears on the probandum</h5>${view.relevant.map(node).join(" ")}</div>
    <div class="tray irrelevant"><h5>no path to the probandum</h5>${view.irrelevant.map(node).join(" ")}</div>
    ${chainBlock}`;
}
