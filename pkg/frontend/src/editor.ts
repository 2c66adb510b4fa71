/** Mask editing state: a label buffer with a circular brush.
 *
 * Pure logic, no DOM. The canvas layer renders `labels` through the class
 * palette and calls `paint` with image-space coordinates.
 */

export class MaskEditor {
  readonly width: number;
  readonly height: number;
  labels: Uint8Array;

  constructor(width: number, height: number, initial?: Uint8Array) {
    this.width = width;
    this.height = height;
    this.labels = new Uint8Array(width * height);
    if (initial) this.prefill(initial);
  }

  /** Replace the whole buffer (e.g. with the model prediction). */
  prefill(labels: Uint8Array): void {
    if (labels.length !== this.labels.length) {
      throw new Error(`prefill size ${labels.length} != ${this.labels.length}`);
    }
    this.labels.set(labels);
  }

  fill(cls: number): void {
    this.labels.fill(cls);
  }

  /** Paint a filled circle of class `cls`; coordinates are image pixels. */
  paint(cx: number, cy: number, radius: number, cls: number): number {
    let changed = 0;
    const r2 = radius * radius;
    const x0 = Math.max(0, Math.floor(cx - radius));
    const x1 = Math.min(this.width - 1, Math.ceil(cx + radius));
    const y0 = Math.max(0, Math.floor(cy - radius));
    const y1 = Math.min(this.height - 1, Math.ceil(cy + radius));
    for (let y = y0; y <= y1; y++) {
      for (let x = x0; x <= x1; x++) {
        const dx = x - cx;
        const dy = y - cy;
        if (dx * dx + dy * dy <= r2) {
          const at = y * this.width + x;
          if (this.labels[at] !== cls) {
            this.labels[at] = cls;
            changed++;
          }
        }
      }
    }
    return changed;
  }

  /** Number of pixels differing from another buffer. */
  diff(other: Uint8Array): number {
    if (other.length !== this.labels.length) {
      throw new Error("buffer size mismatch");
    }
    let n = 0;
    for (let i = 0; i < other.length; i++) {
      if (this.labels[i] !== other[i]) n++;
    }
    return n;
  }

  clone(): Uint8Array {
    return this.labels.slice();
  }
}
