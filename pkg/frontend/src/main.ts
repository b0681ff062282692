/** Browser bootstrap: fetch the case, wire the three panels, keep the URL
 * in sync with the panel state. All logic lives in the imported modules;
 * this file only moves data between them and the DOM.
 */

import { Client, CaseItem } from "./api.js";
import { CegExplorer } from "./ceg.js";
import { PosteriorPanel } from "./posterior.js";
import { renderCeg, renderPosterior, renderRelevance, renderToggles } from "./render.js";
import {
  CrossrefTable,
  PanelState,
  cycleToggle,
  decodeState,
  encodeState,
  evidenceBody,
  sanitizeState,
  togglableItems,
} from "./state.js";
import { ChainsView, RelevanceView, loadChains, loadRelevance } from "./wigmore.js";

const BN_MODEL = "kercher-bn";
const CEG_MODEL = "kercher-ceg";
const WATCHED = ["S knife used?", "40"];

const client = new Client((url, init) => fetch(url, init), "/api/v1");

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node;
}

async function boot(): Promise<void> {
  const app = el("app");
  app.innerHTML = `
    <header><h1>evidentia workbench</h1></header>
    <section class="panel" id="evidence-panel">
      <h3>evidence toggles</h3>
      <div id="toggles"></div>
      <h3>posteriors</h3>
      <div id="posterior"></div>
    </section>
    <section class="panel" id="ceg-panel">
      <h3>storylines</h3>
      <div id="ceg"></div>
    </section>
    <section class="panel" id="wigmore-panel">
      <h3>argument charts</h3>
      <nav id="chart-tabs"></nav>
      <div id="wigmore"></div>
    </section>`;

  const { body: modelsBody } = await client.models();
  const { body: itemsBody } = await client.items();
  const items: CaseItem[] = itemsBody.items;
  const crossref: CrossrefTable = {};
  await Promise.all(
    items.map(async (item) => {
      crossref[item.number] = (await client.crossref(item.number)).body.references;
    }),
  );

  let state: PanelState = sanitizeState(decodeState(location.search, BN_MODEL), crossref);
  const togglable = togglableItems(crossref, state.model);

  const posterior = new PosteriorPanel(client, state.model, WATCHED, (view) => {
    el("posterior").innerHTML = renderPosterior(view);
  });
  const explorer = new CegExplorer(client, CEG_MODEL, (view) => {
    el("ceg").innerHTML = renderCeg(view);
  });

  const charts = modelsBody.models.filter((m) => m.kind === "chart").map((m) => m.id);
  let activeChart = charts[0];
  let relevance: RelevanceView | undefined;
  let chains: ChainsView | undefined;

  function drawToggles(): void {
    el("toggles").innerHTML = renderToggles(items, togglable, state);
  }

  function drawWigmore(): void {
    el("chart-tabs").innerHTML = charts
      .map(
        (id) =>
          `<button type="button" data-chart="${id}" class="${id === activeChart ? "active" : ""}">${id}</button>`,
      )
      .join(" ");
    if (relevance !== undefined) el("wigmore").innerHTML = renderRelevance(relevance, chains);
  }

  function syncUrl(): void {
    history.replaceState(null, "", `?${encodeState(state)}`);
  }

  function applyState(next: PanelState): void {
    state = next;
    syncUrl();
    drawToggles();
    void posterior.refresh(evidenceBody(state, crossref, WATCHED));
  }

  async function showChart(id: string): Promise<void> {
    activeChart = id;
    chains = undefined;
    relevance = await loadRelevance(client, id);
    drawWigmore();
  }

  app.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const item = target.getAttribute("data-toggle-item");
    if (item !== null) {
      const next = { ...state, toggles: { ...state.toggles } };
      const value = cycleToggle(next.toggles[item]);
      if (value === undefined) delete next.toggles[item];
      else next.toggles[item] = value;
      applyState(next);
      return;
    }
    const label = target.getAttribute("data-ceg-label");
    if (label !== null) {
      void explorer.conditionOn(label);
      return;
    }
    if (target.hasAttribute("data-ceg-back")) {
      explorer.back();
      return;
    }
    const chart = target.getAttribute("data-chart");
    if (chart !== null) {
      void showChart(chart);
      return;
    }
    const chainNode = target.getAttribute("data-chain-node");
    if (chainNode !== null) {
      void loadChains(client, activeChart, chainNode).then((cv) => {
        chains = cv;
        drawWigmore();
      });
    }
  });

  syncUrl();
  drawToggles();
  void posterior.refresh(evidenceBody(state, crossref, WATCHED));
  void explorer.load();
  if (activeChart !== undefined) void showChart(activeChart);
}

boot().catch((err: unknown) => {
  el("app").innerHTML = `<p class="banner error">workbench failed to start: ${String(err)}</p>`;
});
