// SVG string renderers. Everything is plain markup so the view layer stays
// injectable into innerHTML and unit-testable without a DOM. X axes share one
// scale per dataset length, which keeps the series, profile, and length
// panels vertically aligned.

import type { Checkpoint } from "./types.js";
import type { Overlay } from "./state.js";

export interface Scale {
  domainMax: number; // x domain is [0, domainMax]
  width: number;
  height: number;
}

const PAD = { left: 44, right: 10, top: 8, bottom: 18 };

function sx(scale: Scale, x: number): number {
  const inner = scale.width - PAD.left - PAD.right;
  return PAD.left + (x / Math.max(1, scale.domainMax)) * inner;
}

function yMapper(scale: Scale, values: number[]): (v: number) => number {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (hi === lo) hi = lo + 1;
  const inner = scale.height - PAD.top - PAD.bottom;
  return (v) => PAD.top + (1 - (v - lo) / (hi - lo)) * inner;
}

function polylinePoints(scale: Scale, xs: number[], ys: number[],
                        toY: (v: number) => number): string {
  const pts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    if (!Number.isFinite(ys[i])) continue;
    pts.push(`${sx(scale, xs[i]).toFixed(1)},${toY(ys[i]).toFixed(1)}`);
  }
  return pts.join(" ");
}

export function lineChart(opts: {
  scale: Scale;
  xs: number[];
  ys: number[];
  css: string;
  overlays?: Overlay[];
  overlayYs?: (offset: number, length: number) => { xs: number[]; ys: number[] } | null;
  markers?: number[]; // x positions to dot along the curve
  title?: string;
}): string {
  const { scale, xs, ys } = opts;
  const toY = yMapper(scale, ys);
  const parts: string[] = [];
  parts.push(`<svg class="chart ${opts.css}" viewBox="0 0 ${scale.width} ${scale.height}" ` +
    `preserveAspectRatio="none" xmlns="http://www.w3.org/2000/svg">`);
  if (opts.title) {
    parts.push(`<text class="chart-title" x="${PAD.left}" y="${PAD.top + 4}">${opts.title}</text>`);
  }
  parts.push(`<polyline class="series-line" fill="none" ` +
    `points="${polylinePoints(scale, xs, ys, toY)}"/>`);
  for (const m of opts.markers ?? []) {
    const idx = nearestIndex(xs, m);
    if (idx < 0 || !Number.isFinite(ys[idx])) continue;
    parts.push(`<circle class="checkpoint-marker" data-offset="${m}" ` +
      `cx="${sx(scale, m).toFixed(1)}" cy="${toY(ys[idx]).toFixed(1)}" r="2.5"/>`);
  }
  for (const ov of opts.overlays ?? []) {
    const seg = opts.overlayYs?.(ov.offset, ov.length) ?? null;
    if (seg && seg.xs.length) {
      parts.push(`<polyline class="overlay overlay-${ov.kind}" data-offset="${ov.offset}" ` +
        `data-kind="${ov.kind}" fill="none" ` +
        `points="${polylinePoints(scale, seg.xs, seg.ys, toY)}"/>`);
    } else {
      // no sampled values inside the window: still mark its span
      const x0 = sx(scale, ov.offset).toFixed(1);
      const w = Math.max(1, sx(scale, ov.offset + ov.length) - sx(scale, ov.offset)).toFixed(1);
      parts.push(`<rect class="overlay overlay-${ov.kind}" data-offset="${ov.offset}" ` +
        `data-kind="${ov.kind}" x="${x0}" y="${PAD.top}" width="${w}" ` +
        `height="${scale.height - PAD.top - PAD.bottom}"/>`);
    }
  }
  parts.push("</svg>");
  return parts.join("");
}

function nearestIndex(xs: number[], x: number): number {
  // xs ascending; binary search for the closest sample
  let lo = 0;
  let hi = xs.length - 1;
  if (hi < 0) return -1;
  while (lo < hi) {
    const mid = (lo + hi) >> 1;
    if (xs[mid] < x) lo = mid + 1;
    else hi = mid;
  }
  if (lo > 0 && Math.abs(xs[lo - 1] - x) < Math.abs(xs[lo] - x)) return lo - 1;
  return lo;
}

export function seriesChart(opts: {
  scale: Scale;
  offsets: number[];
  values: number[];
  overlays: Overlay[];
}): string {
  return lineChart({
    scale: opts.scale,
    xs: opts.offsets,
    ys: opts.values,
    css: "series-chart",
    overlays: opts.overlays,
    overlayYs: (offset, length) => {
      const xs: number[] = [];
      const ys: number[] = [];
      for (let i = 0; i < opts.offsets.length; i++) {
        if (opts.offsets[i] >= offset && opts.offsets[i] < offset + length) {
          xs.push(opts.offsets[i]);
          ys.push(opts.values[i]);
        }
      }
      return { xs, ys };
    },
  });
}

/** The two aligned panels for a snapshot: normalized profile and best-length
 * profile, checkpoint positions dotted on the latter. */
export function valmapPanels(opts: {
  scale: Scale;
  mpn: (number | null)[];
  lp: number[];
  checkpoints: Checkpoint[];
}): string {
  const xs = opts.mpn.map((_, i) => i);
  const mpnYs = opts.mpn.map((v) => (v === null ? NaN : v));
  const markers = [...new Set(opts.checkpoints.map((c) => c.offset))].sort((a, b) => a - b);
  const top = lineChart({
    scale: opts.scale,
    xs,
    ys: mpnYs,
    css: "mpn-chart",
    title: "normalized profile",
  });
  const bottom = lineChart({
    scale: opts.scale,
    xs,
    ys: opts.lp,
    css: "lp-chart",
    markers,
    title: "best match length",
  });
  return top + bottom;
}
