import { describe, expect, it } from "vitest";
import { PNG } from "pngjs";

import { adler32, base64Encode, crc32, encodeGray8Png, zlibStored } from "../src/png.js";

describe("checksums", () => {
  it("crc32 matches known vectors", () => {
    // standard test vector: crc32("123456789") = 0xCBF43926
    const data = new TextEncoder().encode("123456789");
    expect(crc32(data)).toBe(0xcbf43926);
    expect(crc32(new Uint8Array(0))).toBe(0);
  });

  it("adler32 matches known vectors", () => {
    // adler32("Wikipedia") = 0x11E60398
    const data = new TextEncoder().encode("Wikipedia");
    expect(adler32(data)).toBe(0x11e60398);
    expect(adler32(new Uint8Array(0))).toBe(1);
  });
});

describe("zlibStored", () => {
  it("wraps data in a valid stored block", () => {
    const raw = new Uint8Array([1, 2, 3]);
    const z = zlibStored(raw);
    expect(z[0]).toBe(0x78);
    expect(z[1]).toBe(0x01);
    expect(z[2]).toBe(1); // BFINAL, stored
    expect(z[3]).toBe(3); // LEN lo
    expect(z[4]).toBe(0); // LEN hi
    expect(z[5]).toBe(0xfc); // NLEN = ~LEN
    expect(z[6]).toBe(0xff);
    expect(Array.from(z.subarray(7, 10))).toEqual([1, 2, 3]);
  });

  it("splits payloads larger than one stored block", () => {
    const raw = new Uint8Array(70000).fill(7);
    const z = zlibStored(raw);
    expect(z[2]).toBe(0); // first block not final
    const firstLen = z[3] | (z[4] << 8);
    expect(firstLen).toBe(65535);
  });
});

describe("encodeGray8Png", () => {
  it("round-trips through a real PNG decoder", () => {
    const width = 5;
    const height = 3;
    const labels = new Uint8Array([...Array(width * height).keys()].map((i) => (i * 17) % 256));
    const bytes = encodeGray8Png(width, height, labels);
    const decoded = PNG.sync.read(Buffer.from(bytes));
    expect(decoded.width).toBe(width);
    expect(decoded.height).toBe(height);
    for (let i = 0; i < labels.length; i++) {
      expect(decoded.data[i * 4]).toBe(labels[i]); // R channel carries the index
      expect(decoded.data[i * 4 + 1]).toBe(labels[i]);
      expect(decoded.data[i * 4 + 2]).toBe(labels[i]);
    }
  });

  it("rejects mismatched buffer sizes", () => {
    expect(() => encodeGray8Png(4, 4, new Uint8Array(3))).toThrow(/expected 16/);
  });

  it("encodes a 1x1 image", () => {
    const bytes = encodeGray8Png(1, 1, new Uint8Array([9]));
    const decoded = PNG.sync.read(Buffer.from(bytes));
    expect(decoded.width).toBe(1);
    expect(decoded.data[0]).toBe(9);
  });
});

describe("base64Encode", () => {
  it("matches Buffer's encoding", () => {
    const data = new Uint8Array([0, 1, 2, 250, 251, 252]);
    expect(base64Encode(data)).toBe(Buffer.from(data).toString("base64"));
  });

  it("handles large buffers", () => {
    const data = new Uint8Array(100000).map((_, i) => i % 256);
    expect(base64Encode(data)).toBe(Buffer.from(data).toString("base64"));
  });
});
