/** Argument-chart view models: relevance trays and chain listings. */

import { Chain, Client } from "./api.js";

export interface RelevanceView {
  chart: string;
  probandum: string;
  relevant: string[];
  /** items with no argument path to the probandum — drawn as a separate tray */
  irrelevant: string[];
  empty: boolean;
}

export async function loadRelevance(client: Client, chart: string): Promise<RelevanceView> {
  const { body } = await client.relevance(chart);
  return {
    chart,
    probandum: body.probandum,
    relevant: body.relevant,
    irrelevant: body.irrelevant,
    empty: body.relevant.length === 0 && body.irrelevant.length === 0,
  };
}

/** `35 -[supports]-> 34 -[supports]-> 51 -[opposes]-> SubP1` */
export function formatChain(chain: Chain): string {
  return chain.nodes
    .map((node, i) => (i === 0 ? node : ` -[${chain.polarities[i - 1]}]-> ${node}`))
    .join("");
}

export interface ChainsView {
  node: string;
  lines: string[];
  /** polarity of each chain's final link into the probandum */
  terminal: string[];
}

export async function loadChains(client: Client, chart: string, node: string): Promise<ChainsView> {
  const { body } = await client.chains(chart, node);
  return {
    node,
    lines: body.chains.map(formatChain),
    terminal: body.chains.map((c) => c.polarities[c.polarities.length - 1]),
  };
}
