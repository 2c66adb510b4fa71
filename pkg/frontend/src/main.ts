/** Annotation console: queue panel, canvas mask editor with prediction and
 * uncertainty overlays, and a live metrics panel. All authoritative state
 * lives in the service; this UI only renders responses and posts actions. */

import { ApiError, ServiceClient, sortQueue } from "./api.js";
import { drawGroupedBars, drawLineChart, heatColor } from "./charts.js";
import { MaskEditor } from "./editor.js";
import { encodeGray8Png } from "./png.js";
import type { CycleRecord, Meta, QueueItem } from "./types.js";

const client = new ServiceClient("");

const el = {
  status: document.getElementById("status-line") as HTMLElement,
  queue: document.getElementById("queue-list") as HTMLElement,
  advance: document.getElementById("advance-btn") as HTMLButtonElement,
  palette: document.getElementById("class-palette") as HTMLElement,
  sampleTitle: document.getElementById("sample-title") as HTMLElement,
  stack: document.getElementById("canvas-stack") as HTMLElement,
  image: document.getElementById("layer-image") as HTMLCanvasElement,
  prediction: document.getElementById("layer-prediction") as HTMLCanvasElement,
  uncertainty: document.getElementById("layer-uncertainty") as HTMLCanvasElement,
  mask: document.getElementById("layer-mask") as HTMLCanvasElement,
  togglePrediction: document.getElementById("toggle-prediction") as HTMLInputElement,
  toggleUncertainty: document.getElementById("toggle-uncertainty") as HTMLInputElement,
  toggleMask: document.getElementById("toggle-mask") as HTMLInputElement,
  brushSize: document.getElementById("brush-size") as HTMLInputElement,
  prefill: document.getElementById("prefill-btn") as HTMLButtonElement,
  submit: document.getElementById("submit-btn") as HTMLButtonElement,
  message: document.getElementById("message-line") as HTMLElement,
  miouChart: document.getElementById("miou-chart") as HTMLCanvasElement,
  classChart: document.getElementById("class-chart") as HTMLCanvasElement,
};

const SCALE = 14;

interface SessionState {
  meta: Meta | null;
  queue: QueueItem[];
  active: string | null;
  brushClass: number;
  editor: MaskEditor | null;
  prediction: Uint8Array | null;
  records: CycleRecord[];
}

const state: SessionState = {
  meta: null,
  queue: [],
  active: null,
  brushClass: 0,
  editor: null,
  prediction: null,
  records: [],
};

function note(text: string, isError = false): void {
  el.message.textContent = text;
  el.message.className = isError ? "error" : "";
}

async function loadPngLabels(url: string, width: number, height: number): Promise<Uint8Array> {
  const img = new Image();
  img.src = url + "?t=" + Date.now(); // bypass cache between cycles
  await img.decode();
  const canvas = document.createElement("canvas");
  canvas.width = width;
  canvas.height = height;
  const ctx = canvas.getContext("2d")!;
  ctx.drawImage(img, 0, 0);
  const rgba = ctx.getImageData(0, 0, width, height).data;
  const labels = new Uint8Array(width * height);
  for (let i = 0; i < labels.length; i++) {
    labels[i] = rgba[i * 4]; // grayscale PNG: R channel == index
  }
  return labels;
}

function renderStatusLine(status: {
  cycle: number;
  labeled: number;
  unlabeled: number;
  pending: number;
  consumed: number;
  total_budget: number;
  busy: boolean;
  done: boolean;
}): void {
  el.status.textContent =
    `cycle ${status.cycle} | labeled ${status.labeled} | unlabeled ${status.unlabeled}` +
    ` | pending ${status.pending} | budget ${status.consumed}/${status.total_budget}` +
    (status.busy ? " | training..." : status.done ? " | done" : "");
}

function renderQueue(): void {
  el.queue.innerHTML = "";
  for (const item of sortQueue(state.queue)) {
    const row = document.createElement("button");
    row.className = "queue-item" + (item.sample_id === state.active ? " active" : "");
    const score = item.score === null ? "" : ` (${item.score.toFixed(4)})`;
    row.textContent = `${item.sample_id}${score}`;
    row.onclick = () => void openSample(item.sample_id);
    el.queue.appendChild(row);
  }
  el.advance.disabled = state.queue.length > 0;
}

function renderPalette(): void {
  const meta = state.meta;
  if (!meta) return;
  el.palette.innerHTML = "";
  meta.class_names.forEach((name, cls) => {
    const [r, g, b] = meta.color_map[cls];
    const btn = document.createElement("button");
    btn.className = "class-chip" + (cls === state.brushClass ? " active" : "");
    btn.innerHTML = `<span class="swatch" style="background: rgb(${r},${g},${b})"></span>${cls}: ${name}`;
    btn.onclick = () => {
      state.brushClass = cls;
      renderPalette();
    };
    el.palette.appendChild(btn);
  });
}

function paintMaskLayer(): void {
  const meta = state.meta;
  const editor = state.editor;
  if (!meta || !editor) return;
  const ctx = el.mask.getContext("2d")!;
  const img = ctx.createImageData(meta.width, meta.height);
  for (let i = 0; i < editor.labels.length; i++) {
    const [r, g, b] = meta.color_map[editor.labels[i]] ?? [0, 0, 0];
    img.data[i * 4] = r;
    img.data[i * 4 + 1] = g;
    img.data[i * 4 + 2] = b;
    img.data[i * 4 + 3] = 160;
  }
  drawScaled(el.mask, img, meta);
}

function drawScaled(canvas: HTMLCanvasElement, img: ImageData, meta: Meta): void {
  const tmp = document.createElement("canvas");
  tmp.width = meta.width;
  tmp.height = meta.height;
  tmp.getContext("2d")!.putImageData(img, 0, 0);
  const ctx = canvas.getContext("2d")!;
  ctx.imageSmoothingEnabled = false;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.drawImage(tmp, 0, 0, canvas.width, canvas.height);
}

async function openSample(sampleId: string): Promise<void> {
  const meta = state.meta;
  if (!meta) return;
  state.active = sampleId;
  el.sampleTitle.textContent = sampleId;
  renderQueue();

  for (const canvas of [el.image, el.prediction, el.uncertainty, el.mask]) {
    canvas.width = meta.width * SCALE;
    canvas.height = meta.height * SCALE;
  }

  const image = new Image();
  image.src = client.imageUrl(sampleId) + "?t=" + Date.now();
  await image.decode();
  const ictx = el.image.getContext("2d")!;
  ictx.imageSmoothingEnabled = false;
  ictx.drawImage(image, 0, 0, el.image.width, el.image.height);

  const prediction = await loadPngLabels(client.predictionUrl(sampleId), meta.width, meta.height);
  state.prediction = prediction;
  const pimg = new ImageData(meta.width, meta.height);
  for (let i = 0; i < prediction.length; i++) {
    const [r, g, b] = meta.color_map[prediction[i]] ?? [0, 0, 0];
    pimg.data[i * 4] = r;
    pimg.data[i * 4 + 1] = g;
    pimg.data[i * 4 + 2] = b;
    pimg.data[i * 4 + 3] = 150;
  }
  drawScaled(el.prediction, pimg, meta);

  const heat = await loadPngLabels(client.uncertaintyUrl(sampleId), meta.width, meta.height);
  const uimg = new ImageData(meta.width, meta.height);
  for (let i = 0; i < heat.length; i++) {
    const [r, g, b] = heatColor(heat[i] / 255);
    uimg.data[i * 4] = r;
    uimg.data[i * 4 + 1] = g;
    uimg.data[i * 4 + 2] = b;
    uimg.data[i * 4 + 3] = Math.round(heat[i] * 0.75);
  }
  drawScaled(el.uncertainty, uimg, meta);

  state.editor = new MaskEditor(meta.width, meta.height);
  state.editor.prefill(prediction);
  paintMaskLayer();
  applyOverlayToggles();
  note(`editing ${sampleId}; prefilled from prediction`);
}

function applyOverlayToggles(): void {
  el.prediction.style.visibility = el.togglePrediction.checked ? "visible" : "hidden";
  el.uncertainty.style.visibility = el.toggleUncertainty.checked ? "visible" : "hidden";
  el.mask.style.visibility = el.toggleMask.checked ? "visible" : "hidden";
}

async function submitActive(): Promise<void> {
  const meta = state.meta;
  const editor = state.editor;
  if (!meta || !editor || !state.active) return;
  const png = encodeGray8Png(meta.width, meta.height, editor.labels);
  try {
    const accepted = await client.submitLabel(state.active, png);
    note(`submitted ${accepted.id}; labeled=${accepted.labeled}, pending=${accepted.pending}`);
    state.active = null;
    state.editor = null;
    await refreshAll();
  } catch (err) {
    if (err instanceof ApiError) {
      note(`submit rejected (${err.status} ${err.code}): ${err.message}`, true);
    } else {
      note(String(err), true);
    }
    // local edits are retained so the annotator can correct and retry
  }
}

async function advanceCycle(): Promise<void> {
  try {
    const response = await client.advance();
    if (!response.advancing) {
      note(`cycle not advanced: ${response.reason ?? "unknown"}`);
      return;
    }
    note("advancing cycle: retraining and selecting...");
    el.advance.disabled = true;
    const status = await client.waitIdle();
    if (status.error) {
      note(`cycle advance failed: ${status.error}`, true);
    } else {
      note(`cycle advanced; ${status.pending} new samples queued`);
    }
    await refreshAll();
  } catch (err) {
    if (err instanceof ApiError) note(`advance rejected (${err.status} ${err.code})`, true);
  }
}

function renderMetrics(): void {
  const meta = state.meta;
  if (!meta) return;
  const cycles = state.records.map((r) => r.cycle);
  const miou = state.records.map((r) => r.miou);
  drawLineChart(el.miouChart, cycles, miou, "mIoU per cycle");

  const last = state.records[state.records.length - 1];
  const groups = meta.class_names.map((name, cls) => ({
    label: String(cls),
    values: last
      ? [last.iou[cls], last.iou[cls] === null ? null : 1 - (last.iou[cls] as number),
         last.weights ? last.weights[cls] : null]
      : [null, null, null],
  }));
  drawGroupedBars(el.classChart, groups, ["#6cf", "#fa6", "#9f9"], ["iou", "gap", "weight"]);
}

async function refreshAll(): Promise<void> {
  const status = await client.status();
  renderStatusLine(status);
  state.queue = await client.queue();
  renderQueue();
  state.records = await client.metrics();
  renderMetrics();
  if (state.active === null && state.queue.length > 0) {
    await openSample(sortQueue(state.queue)[0].sample_id);
  }
}

function bindEvents(): void {
  let painting = false;
  const paintAt = (event: MouseEvent): void => {
    const meta = state.meta;
    const editor = state.editor;
    if (!meta || !editor) return;
    const rect = el.mask.getBoundingClientRect();
    const x = ((event.clientX - rect.left) / rect.width) * meta.width;
    const y = ((event.clientY - rect.top) / rect.height) * meta.height;
    editor.paint(x, y, Number(el.brushSize.value), state.brushClass);
    paintMaskLayer();
  };
  el.stack.addEventListener("mousedown", (event) => {
    painting = true;
    paintAt(event as MouseEvent);
  });
  window.addEventListener("mouseup", () => {
    painting = false;
  });
  el.stack.addEventListener("mousemove", (event) => {
    if (painting) paintAt(event as MouseEvent);
  });

  el.prefill.onclick = () => {
    if (state.editor && state.prediction) {
      state.editor.prefill(state.prediction);
      paintMaskLayer();
      note("prefilled from prediction");
    }
  };
  el.submit.onclick = () => void submitActive();
  el.advance.onclick = () => void advanceCycle();
  for (const toggle of [el.togglePrediction, el.toggleUncertainty, el.toggleMask]) {
    toggle.onchange = applyOverlayToggles;
  }

  window.addEventListener("keydown", (event) => {
    if (event.target instanceof HTMLInputElement) return;
    const meta = state.meta;
    if (!meta) return;
    if (event.key >= "0" && event.key <= "9") {
      const cls = Number(event.key);
      if (cls < meta.num_classes) {
        state.brushClass = cls;
        renderPalette();
      }
    } else if (event.key === "Enter") {
      // accept prediction: prefill then submit in one stroke
      if (state.editor && state.prediction) {
        state.editor.prefill(state.prediction);
        void submitActive();
      }
    }
  });
}

async function start(): Promise<void> {
  try {
    state.meta = await client.meta();
    renderPalette();
    bindEvents();
    await refreshAll();
    setInterval(() => {
      void client.status().then(renderStatusLine).catch(() => undefined);
    }, 3000);
  } catch (err) {
    note(`cannot reach the annotation service: ${String(err)}`, true);
  }
}

void start();
