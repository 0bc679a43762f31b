// Browser bootstrap: wires the panels to the view state. All numbers shown
// come from service payloads; this file only formats and forwards events.

import { ServiceClient } from "./api.js";
import { seriesChart, valmapPanels, type Scale } from "./charts.js";
import { DEFAULT_PARAMS, ExplorerState } from "./state.js";

const POLL_MS = 300;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function fmt(x: number, digits = 4): string {
  return Number.isFinite(x) ? x.toPrecision(digits) : "-";
}

export function bootstrap(): void {
  // same-origin by default; ?service=http://host:port points elsewhere
  // (the service allows cross-origin requests)
  const serviceBase = new URLSearchParams(window.location.search).get("service") ?? "";
  const client = new ServiceClient(serviceBase);
  const state = new ExplorerState(client, render);
  let pollTimer: number | null = null;

  const fileInput = el<HTMLInputElement>("dataset-file");
  const uploadBtn = el<HTMLButtonElement>("upload-btn");
  const datasetLabel = el<HTMLSpanElement>("dataset-label");
  const seriesPanel = el<HTMLDivElement>("series-panel");
  const lminInput = el<HTMLInputElement>("lmin");
  const lmaxInput = el<HTMLInputElement>("lmax");
  const kInput = el<HTMLInputElement>("k");
  const validation = el<HTMLDivElement>("validation");
  const runBtn = el<HTMLButtonElement>("run-btn");
  const progressBar = el<HTMLDivElement>("progress-bar");
  const progressText = el<HTMLSpanElement>("progress-text");
  const slider = el<HTMLInputElement>("view-length");
  const sliderLabel = el<HTMLSpanElement>("view-length-label");
  const valmapPanel = el<HTMLDivElement>("valmap-panel");
  const motifTable = el<HTMLTableSectionElement>("motif-rows");
  const expandBtn = el<HTMLButtonElement>("expand-btn");
  const clearBtn = el<HTMLButtonElement>("clear-btn");
  const errorBox = el<HTMLDivElement>("error-box");

  lminInput.value = String(DEFAULT_PARAMS.lmin);
  lmaxInput.value = String(DEFAULT_PARAMS.lmax);
  kInput.value = String(DEFAULT_PARAMS.k);

  uploadBtn.addEventListener("click", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    await state.uploadDataset(file.name, await file.text());
  });

  for (const input of [lminInput, lmaxInput, kInput]) {
    input.addEventListener("input", () => {
      state.params.lmin = Number(lminInput.value);
      state.params.lmax = Number(lmaxInput.value);
      state.params.k = Number(kInput.value);
      render();
    });
  }

  runBtn.addEventListener("click", async () => {
    await state.submitRun();
    if (pollTimer !== null) window.clearInterval(pollTimer);
    pollTimer = window.setInterval(async () => {
      await state.pollJob();
      const st = state.job?.state;
      if (st === "done" || st === "failed") {
        if (pollTimer !== null) window.clearInterval(pollTimer);
        pollTimer = null;
      }
    }, POLL_MS);
  });

  // moving the slider only ever fetches a snapshot of the finished run
  slider.addEventListener("input", () => {
    void state.setViewLength(Number(slider.value));
  });

  expandBtn.addEventListener("click", () => void state.expandSelected());
  clearBtn.addEventListener("click", () => state.clearSelection());

  function render(): void {
    errorBox.textContent = state.lastError ?? "";
    errorBox.hidden = !state.lastError;

    datasetLabel.textContent = state.dataset
      ? `${state.dataset.name} (${state.dataset.length} points)`
      : "no dataset";

    const problems = state.validation();
    validation.textContent = problems.join("; ");
    runBtn.disabled = problems.length > 0 || state.job?.state === "running";

    if (state.preview) {
      const scale: Scale = { domainMax: state.preview.to, width: 900, height: 160 };
      seriesPanel.innerHTML = seriesChart({
        scale,
        offsets: state.preview.offsets,
        values: state.preview.values,
        overlays: state.overlays,
      });
    }

    const job = state.job;
    if (job) {
      const pct = Math.round(state.progress() * 100);
      progressBar.style.width = `${pct}%`;
      progressText.textContent = job.state === "running"
        ? `${job.state}: length ${job.current_length ?? job.params.lmin} of ` +
          `[${job.params.lmin}, ${job.params.lmax}]`
        : job.state + (job.error ? `: ${job.error}` : "");
      slider.min = String(job.params.lmin);
      slider.max = String(job.params.lmax);
      slider.disabled = job.state !== "done";
      if (state.viewLength !== null) slider.value = String(state.viewLength);
      sliderLabel.textContent = state.viewLength === null ? "-" : String(state.viewLength);
    }

    if (state.snapshot) {
      const scale: Scale = {
        domainMax: state.snapshot.mpn.length - 1,
        width: 900,
        height: 150,
      };
      valmapPanel.innerHTML = valmapPanels({
        scale,
        mpn: state.snapshot.mpn,
        lp: state.snapshot.lp,
        checkpoints: state.snapshot.checkpoints,
      });
    }

    motifTable.innerHTML = "";
    state.motifs.forEach((pair, idx) => {
      const row = document.createElement("tr");
      if (state.selected === pair) row.classList.add("selected");
      row.innerHTML =
        `<td>${idx + 1}</td><td>${pair.length}</td><td>${pair.left}</td>` +
        `<td>${pair.right}</td><td>${fmt(pair.norm_distance)}</td>` +
        `<td>${fmt(pair.distance)}</td>`;
      row.addEventListener("click", () => state.selectPair(pair));
      motifTable.appendChild(row);
    });
    expandBtn.disabled = !state.selected;
    clearBtn.disabled = state.overlays.length === 0;
  }

  render();
}

bootstrap();
