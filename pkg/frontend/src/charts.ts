/** Small canvas chart helpers for the metrics panel. The scale math is kept
 * in pure functions so it can be unit tested without a DOM. */

export interface Scale {
  min: number;
  max: number;
}

/** Padded y-range for a set of values; falls back to [0, 1] when empty. */
export function niceRange(values: number[]): Scale {
  const defined = values.filter((v) => Number.isFinite(v));
  if (defined.length === 0) return { min: 0, max: 1 };
  let min = Math.min(...defined);
  let max = Math.max(...defined);
  if (min === max) {
    min -= 0.05;
    max += 0.05;
  }
  const pad = (max - min) * 0.1;
  return { min: Math.max(0, min - pad), max: Math.min(1, max + pad) };
}

export function toCanvasX(index: number, count: number, width: number, margin = 30): number {
  if (count <= 1) return margin;
  return margin + (index * (width - 2 * margin)) / (count - 1);
}

export function toCanvasY(value: number, scale: Scale, height: number, margin = 16): number {
  const t = (value - scale.min) / (scale.max - scale.min || 1);
  return height - margin - t * (height - 2 * margin);
}

export function drawLineChart(
  canvas: HTMLCanvasElement,
  xs: number[],
  ys: (number | null)[],
  label: string,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  const defined = ys.filter((v): v is number => v !== null);
  const scale = niceRange(defined);

  ctx.strokeStyle = "#445";
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
  ctx.fillStyle = "#8aa";
  ctx.font = "11px sans-serif";
  ctx.fillText(label, 8, 12);
  if (defined.length) {
    ctx.fillText(scale.max.toFixed(3), 2, toCanvasY(scale.max, scale, height) + 4);
    ctx.fillText(scale.min.toFixed(3), 2, toCanvasY(scale.min, scale, height) + 4);
  }

  ctx.strokeStyle = "#6cf";
  ctx.lineWidth = 1.5;
  ctx.beginPath();
  let started = false;
  ys.forEach((value, i) => {
    if (value === null) return;
    const x = toCanvasX(i, ys.length, width);
    const y = toCanvasY(value, scale, height);
    if (!started) {
      ctx.moveTo(x, y);
      started = true;
    } else {
      ctx.lineTo(x, y);
    }
  });
  ctx.stroke();
  ctx.fillStyle = "#6cf";
  ys.forEach((value, i) => {
    if (value === null) return;
    ctx.beginPath();
    ctx.arc(toCanvasX(i, ys.length, width), toCanvasY(value, scale, height), 2.5, 0, Math.PI * 2);
    ctx.fill();
  });
  ctx.fillStyle = "#8aa";
  xs.forEach((x, i) => {
    if (ys.length > 12 && i % 2 === 1) return;
    ctx.fillText(String(x), toCanvasX(i, xs.length, width) - 3, height - 3);
  });
}

export interface BarGroup {
  label: string;
  values: (number | null)[]; // one bar per series, null renders "n/a"
}

export function drawGroupedBars(
  canvas: HTMLCanvasElement,
  groups: BarGroup[],
  seriesColors: string[],
  seriesNames: string[],
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#445";
  ctx.strokeRect(0.5, 0.5, width - 1, height - 1);
  const margin = 18;
  const base = height - margin;
  const groupWidth = (width - 2 * margin) / Math.max(1, groups.length);
  const barWidth = (groupWidth * 0.8) / Math.max(1, seriesColors.length);

  groups.forEach((group, gi) => {
    const gx = margin + gi * groupWidth + groupWidth * 0.1;
    group.values.forEach((value, si) => {
      const x = gx + si * barWidth;
      if (value === null) {
        ctx.fillStyle = "#556";
        ctx.fillText("n/a", x, base - 4);
        return;
      }
      const h = value * (height - 2 * margin);
      ctx.fillStyle = seriesColors[si % seriesColors.length];
      ctx.fillRect(x, base - h, barWidth * 0.9, h);
    });
    ctx.fillStyle = "#8aa";
    ctx.font = "10px sans-serif";
    ctx.fillText(group.label, gx, height - 4);
  });

  seriesNames.forEach((name, si) => {
    ctx.fillStyle = seriesColors[si % seriesColors.length];
    ctx.fillRect(width - 92, 8 + si * 14, 10, 10);
    ctx.fillStyle = "#8aa";
    ctx.fillText(name, width - 78, 17 + si * 14);
  });
}

/** Blue-to-red heat colormap for the uncertainty overlay. */
export function heatColor(t: number): [number, number, number] {
  const clamped = Math.max(0, Math.min(1, t));
  return [
    Math.round(255 * Math.min(1, clamped * 2)),
    Math.round(80 * (1 - Math.abs(clamped - 0.5) * 2)),
    Math.round(255 * Math.min(1, (1 - clamped) * 2)),
  ];
}
