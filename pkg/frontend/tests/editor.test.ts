import { describe, expect, it } from "vitest";

import { MaskEditor } from "../src/editor.js";

describe("MaskEditor", () => {
  it("starts as all zeros", () => {
    const editor = new MaskEditor(4, 3);
    expect(editor.labels.length).toBe(12);
    expect(Math.max(...editor.labels)).toBe(0);
  });

  it("prefill copies the prediction buffer", () => {
    const prediction = new Uint8Array([1, 2, 3, 4]);
    const editor = new MaskEditor(2, 2);
    editor.prefill(prediction);
    expect(Array.from(editor.labels)).toEqual([1, 2, 3, 4]);
    expect(editor.diff(prediction)).toBe(0);
    prediction[0] = 9; // editor keeps its own copy
    expect(editor.labels[0]).toBe(1);
  });

  it("prefill rejects wrong sizes", () => {
    expect(() => new MaskEditor(2, 2).prefill(new Uint8Array(3))).toThrow(/prefill size/);
  });

  it("brush paints exactly the pixels inside the circle", () => {
    const editor = new MaskEditor(5, 5);
    const changed = editor.paint(2, 2, 1, 7);
    // radius 1 circle centered on a pixel: center plus 4-neighborhood
    expect(changed).toBe(5);
    const painted = [];
    for (let y = 0; y < 5; y++)
      for (let x = 0; x < 5; x++)
        if (editor.labels[y * 5 + x] === 7) painted.push([x, y]);
    expect(painted).toEqual([
      [2, 1],
      [1, 2],
      [2, 2],
      [3, 2],
      [2, 3],
    ]);
  });

  it("submitted mask differs from the prediction exactly in painted pixels", () => {
    const prediction = new Uint8Array(25).fill(1);
    const editor = new MaskEditor(5, 5, prediction);
    const changed = editor.paint(0, 0, 0.5, 2);
    expect(changed).toBe(1);
    expect(editor.diff(prediction)).toBe(1);
    expect(editor.labels[0]).toBe(2);
  });

  it("brush clips at the borders", () => {
    const editor = new MaskEditor(3, 3);
    expect(() => editor.paint(-0.4, -0.4, 1, 4)).not.toThrow();
    expect(editor.labels[0]).toBe(4);
  });

  it("repainting the same class reports zero changes", () => {
    const editor = new MaskEditor(4, 4);
    editor.paint(1, 1, 1, 3);
    expect(editor.paint(1, 1, 1, 3)).toBe(0);
  });
});
