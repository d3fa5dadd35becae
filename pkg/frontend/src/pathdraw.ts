/** Click-sequence path state for the projection view: click points to
 * append, undo removes the last segment, revisits are allowed. */

export class PathDraw {
  private ids: string[] = [];

  append(pointId: string): void {
    this.ids.push(pointId);
  }

  undo(): void {
    this.ids.pop();
  }

  clear(): void {
    this.ids = [];
  }

  get refs(): string[] {
    return this.ids.slice();
  }

  get length(): number {
    return this.ids.length;
  }

  get canRun(): boolean {
    return this.ids.length >= 1;
  }

  /** Consecutive pairs, for drawing the path segments. */
  segments(): [string, string][] {
    const out: [string, string][] = [];
    for (let i = 1; i < this.ids.length; i++) {
      out.push([this.ids[i - 1], this.ids[i]]);
    }
    return out;
  }
}
