/** Test doubles: a scriptable fetch and raw response texts captured from
 * the real service (byte-for-byte, including `1.0`-style floats that a
 * parse/re-print round trip would corrupt).
 */

import type { FetchLike } from "../src/api.js";

export interface Exchange {
  url: string;
  method: string;
  body?: string;
  respond(status: number, raw: string): void;
}

/** A fetch whose responses are resolved by hand, in any order. */
export function manualFetch(): { fetchImpl: FetchLike; exchanges: Exchange[] } {
  const exchanges: Exchange[] = [];
  const fetchImpl: FetchLike = (url, init) =>
    new Promise((resolve) => {
      exchanges.push({
        url,
        method: init?.method ?? "GET",
        body: init?.body,
        respond: (status, raw) => resolve({ status, text: async () => raw }),
      });
    });
  return { fetchImpl, exchanges };
}

/** A fetch answering from a routing function immediately. */
export function routedFetch(
  route: (url: string, method: string, body?: string) => { status: number; raw: string },
): FetchLike {
  return async (url, init) => {
    const { status, raw } = route(url, init?.method ?? "GET", init?.body);
    return { status, text: async () => raw };
  };
}

export const INFER_41_TRUE =
  '{"marginals":{"40":[0.8181818181818181,0.18181818181818182],"41":[1.0,0.0]},"evidence_probability":0.55}';

export const INFER_PRIORS =
  '{"marginals":{"40":[0.5,0.5],"41":[0.55,0.45]},"evidence_probability":1.0}';

export const KNIFE_PATHS =
  '{"paths":[{"labels":["S1","C"],"positions":["w0","w1","w_inf"],"probability":0.12},{"labels":["S1","D"],"positions":["w0","w1","w_inf"],"probability":0.18},{"labels":["S2","C"],"positions":["w0","w1","w_inf"],"probability":0.27999999999999997},{"labels":["S2","D"],"positions":["w0","w1","w_inf"],"probability":0.42}],"total_probability":1.0}';

export const KNIFE_CONDITION_D =
  '{"kept_mass":0.6,"paths":[{"labels":["S1","D"],"positions":["w0","w1","w_inf"],"probability":0.3},{"labels":["S2","D"],"positions":["w0","w1","w_inf"],"probability":0.7}],"ceg":{"format_version":"1","kind":"ceg","root":"w0","sink":"w_inf","vertices":["w0","w1","w_inf"],"edges":[{"tail":"w0","head":"w1","label":"S1","probability":0.3},{"tail":"w0","head":"w1","label":"S2","probability":0.7},{"tail":"w1","head":"w_inf","label":"D","probability":1.0}]}}';

export const IMPOSSIBLE_EVIDENCE =
  '{"error":{"kind":"ImpossibleEvidence","message":"evidence has probability 0.0, below 1e-12"}}';

export const NO_SURVIVING_PATH =
  '{"error":{"kind":"NoSurvivingPath","message":"kept mass 0.0 is below 1e-15 (0 of 4 paths kept)"}}';

export const CHART1_RELEVANCE =
  '{"probandum":"P","relevant":["SubP1","SubP2"],"irrelevant":["1","10","11","12","14","15","16","17","2","20","21","22","3","4","46","5","6","7","8","9"]}';

export const CHART2_CHAINS_35 =
  '{"item":"35","chains":[{"nodes":["35","34","51","SubP1"],"polarities":["supports","supports","opposes"]}]}';
