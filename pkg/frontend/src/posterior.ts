/** The evidence panel's controller: turn toggle state into posterior bars.
 *
 * Displayed probability strings are sliced verbatim out of the service
 * response (rawAt); the parsed float is kept solely to size the bar. While
 * a query is in flight the panel shows a pending state — it never guesses
 * or keeps superseded numbers on screen.
 */

import { ApiError, Client, EvidenceBody } from "./api.js";
import { rawAt } from "./rawjson.js";
import { SequenceTracker } from "./tracker.js";

export interface BarEntry {
  /** state index within the node (the service reports vectors, not names) */
  index: number;
  /** the response field, byte for byte — the only thing ever displayed */
  text: string;
  /** parsed value, used only for bar geometry */
  value: number;
}

export interface NodeBars {
  node: string;
  entries: BarEntry[];
}

export type PosteriorView =
  | { kind: "pending" }
  | { kind: "bars"; evidenceText: string; nodes: NodeBars[] }
  | { kind: "impossible"; message: string }
  | { kind: "error"; error: string; message: string };

export class PosteriorPanel {
  view: PosteriorView = { kind: "pending" };
  /** every view ever shown, oldest first (tests assert stale numbers never appear) */
  readonly shown: PosteriorView[] = [];

  private readonly tracker = new SequenceTracker();

  constructor(
    private readonly client: Client,
    private readonly model: string,
    readonly watched: string[],
    private readonly onChange: (view: PosteriorView) => void = () => {},
  ) {}

  async refresh(evidence: EvidenceBody): Promise<void> {
    const seq = this.tracker.begin();
    this.show({ kind: "pending" });
    let next: PosteriorView;
    try {
      const { raw, body } = await this.client.infer(this.model, evidence);
      next = {
        kind: "bars",
        evidenceText: rawAt(raw, ["evidence_probability"]),
        nodes: this.watched.map((node) => ({
          node,
          entries: body.marginals[node].map((value, index) => ({
            index,
            value,
            text: rawAt(raw, ["marginals", node, index]),
          })),
        })),
      };
    } catch (err) {
      if (!(err instanceof ApiError)) throw err;
      next =
        err.kind === "ImpossibleEvidence"
          ? { kind: "impossible", message: err.message }
          : { kind: "error", error: err.kind, message: err.message };
    }
    if (!this.tracker.current(seq)) return; // superseded by a newer toggle
    this.show(next);
  }

  private show(view: PosteriorView): void {
    this.view = view;
    this.shown.push(view);
    this.onChange(view);
  }
}
