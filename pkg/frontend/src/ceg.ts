/** Storyline explorer: root-to-sink paths, conditioning, back-navigation.
 *
 * Path probabilities and masses are verbatim response text. Conditioning
 * pushes a view onto a stack so "back" restores the previous (ultimately
 * the unconditioned) view without refetching.
 */

import { ApiError, CegPath, Client } from "./api.js";
import { rawAt } from "./rawjson.js";

export interface PathRow {
  labels: string[];
  /** verbatim response text of the path's probability */
  text: string;
  value: number;
}

export type CegView =
  | { kind: "pending" }
  | { kind: "paths"; title: string; massText: string; rows: PathRow[]; depth: number }
  | { kind: "no-paths"; message: string; depth: number }
  | { kind: "error"; error: string; message: string; depth: number };

function rows(raw: string, paths: CegPath[], prefix: Array<string | number>): PathRow[] {
  return paths.map((p, i) => ({
    labels: p.labels,
    value: p.probability,
    text: rawAt(raw, [...prefix, i, "probability"]),
  }));
}

export class CegExplorer {
  view: CegView = { kind: "pending" };

  private stack: CegView[] = [];

  constructor(
    private readonly client: Client,
    private readonly model: string,
    private readonly onChange: (view: CegView) => void = () => {},
  ) {}

  get depth(): number {
    return this.stack.length;
  }

  async load(): Promise<void> {
    const { raw, body } = await this.client.paths(this.model);
    this.stack = [
      {
        kind: "paths",
        title: "all storylines",
        massText: rawAt(raw, ["total_probability"]),
        rows: rows(raw, body.paths, ["paths"]),
        depth: 0,
      },
    ];
    this.show(this.stack[this.stack.length - 1]);
  }

  /** Keep only storylines through `label`; failures render inline and are not pushed. */
  async conditionOn(label: string): Promise<void> {
    try {
      const { raw, body } = await this.client.condition(this.model, { has_label: label });
      const view: CegView = {
        kind: "paths",
        title: `storylines through “${label}”`,
        massText: rawAt(raw, ["kept_mass"]),
        rows: rows(raw, body.paths, ["paths"]),
        depth: this.stack.length,
      };
      this.stack.push(view);
      this.show(view);
    } catch (err) {
      if (!(err instanceof ApiError)) throw err;
      this.show(
        err.kind === "NoSurvivingPath"
          ? { kind: "no-paths", message: err.message, depth: this.stack.length }
          : { kind: "error", error: err.kind, message: err.message, depth: this.stack.length },
      );
    }
  }

  /** Return to the previous view; from depth 1 this is the unconditioned view. */
  back(): void {
    if (this.view.kind === "paths" && this.stack.length > 1) this.stack.pop();
    this.show(this.stack[this.stack.length - 1]);
  }

  private show(view: CegView): void {
    this.view = view;
    this.onChange(view);
  }
}
