/** Last-writer-wins sequencing for overlapping queries.
 *
 * A response may be shown only if no newer request has been issued since
 * it started; rapid toggling must never paint numbers for an evidence
 * state the user has already left.
 */
export class SequenceTracker {
  private issued = 0;

  begin(): number {
    return ++this.issued;
  }

  current(seq: number): boolean {
    return seq === this.issued;
  }
}
