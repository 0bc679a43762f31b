// View state and actions. Pure with respect to the DOM: rendering reads this
// object, actions call the service client and mutate it. Stale responses are
// discarded with per-resource sequence numbers, and the slider can only ever
// fetch snapshots; nothing here resubmits a job.

import type { ServiceClient } from "./api.js";
import type {
  DatasetSummary,
  JobDescriptor,
  MotifPair,
  MotifSetPayload,
  MotifsResponse,
  Preview,
  ValmapSnapshot,
} from "./types.js";

export interface Overlay {
  offset: number;
  length: number;
  kind: "pair-left" | "pair-right" | "member";
}

export interface RunParams {
  lmin: number;
  lmax: number;
  k: number;
  p: number;
  exclusion: number | null;
}

export const DEFAULT_PARAMS: RunParams = {
  lmin: 50,
  lmax: 100,
  k: 3,
  p: 50,
  exclusion: null,
};

// mirrors the server's 422 rules so the form can flag problems before submit
export function validateParams(params: RunParams, seriesLength: number): string[] {
  const problems: string[] = [];
  if (params.lmin < 2) problems.push("lmin must be at least 2");
  if (params.lmin > params.lmax) problems.push("lmax must be >= lmin");
  if (2 * params.lmax > seriesLength) {
    problems.push(`series too short: need length >= 2*lmax (${2 * params.lmax})`);
  }
  if (params.k < 1 || params.k > params.p) problems.push("need 1 <= k <= p");
  if (params.exclusion !== null && params.exclusion < 1) {
    problems.push("exclusion radius must be >= 1");
  }
  return problems;
}

export class ExplorerState {
  dataset: DatasetSummary | null = null;
  preview: Preview | null = null;
  params: RunParams = { ...DEFAULT_PARAMS };
  job: JobDescriptor | null = null;
  snapshot: ValmapSnapshot | null = null;
  motifs: MotifPair[] = [];
  selected: MotifPair | null = null;
  motifSet: MotifSetPayload | null = null;
  overlays: Overlay[] = [];
  viewLength: number | null = null;
  lastError: string | null = null;

  private snapshotSeq = 0;
  private previewSeq = 0;

  constructor(private readonly client: ServiceClient,
              private readonly onChange: () => void = () => {}) {}

  async uploadDataset(filename: string, content: string, options?: {
    format?: string;
    column?: string;
    delimiter?: string;
  }): Promise<void> {
    this.dataset = await this.guard(() =>
      this.client.uploadDataset(filename, content, options));
    this.preview = null;
    this.job = null;
    this.snapshot = null;
    this.motifs = [];
    this.clearSelection();
    if (this.dataset) await this.refreshPreview();
  }

  async refreshPreview(): Promise<void> {
    if (!this.dataset) return;
    const seq = ++this.previewSeq;
    const preview = await this.guard(() => this.client.preview(this.dataset!.dataset_id));
    if (preview && seq === this.previewSeq) {
      this.preview = preview;
      this.onChange();
    }
  }

  validation(): string[] {
    if (!this.dataset) return ["upload a dataset first"];
    return validateParams(this.params, this.dataset.length);
  }

  /** Submit a run. The ONLY place a job is ever created. */
  async submitRun(): Promise<void> {
    const problems = this.validation();
    if (problems.length) {
      this.lastError = problems.join("; ");
      this.onChange();
      return;
    }
    const submitted = await this.guard(() => this.client.submitJob({
      dataset_id: this.dataset!.dataset_id,
      lmin: this.params.lmin,
      lmax: this.params.lmax,
      k: this.params.k,
      p: this.params.p,
      exclusion: this.params.exclusion,
    }));
    if (!submitted) return;
    this.snapshot = null;
    this.motifs = [];
    this.clearSelection();
    this.viewLength = null;
    await this.pollJob(submitted.job_id);
  }

  /** One polling step; the app loops this while the job runs. */
  async pollJob(jobId?: string): Promise<void> {
    const id = jobId ?? this.job?.job_id;
    if (!id) return;
    const desc = await this.guard(() => this.client.job(id));
    if (!desc) return;
    const completed = desc.state === "done" && this.job?.state !== "done";
    this.job = desc;
    this.onChange();
    if (completed) {
      this.viewLength = desc.params.lmax;
      const motifs = await this.guard(() => this.client.motifs(id));
      if (motifs) this.motifs = (motifs as MotifsResponse).pairs;
      await this.fetchSnapshot();
    }
  }

  /** Progress as a 0..1 fraction of the length range, from polling only. */
  progress(): number {
    if (!this.job) return 0;
    if (this.job.state === "done") return 1;
    const { lmin, lmax } = this.job.params;
    const cur = this.job.current_length;
    if (cur === null || lmax === lmin) return 0;
    return Math.max(0, Math.min(1, (cur - lmin) / (lmax - lmin)));
  }

  /**
   * Move the checkpoint slider. Clamps to the job's range and issues exactly
   * one snapshot fetch; never touches the job endpoints.
   */
  async setViewLength(length: number): Promise<void> {
    if (!this.job || this.job.state !== "done") return;
    const { lmin, lmax } = this.job.params;
    this.viewLength = Math.max(lmin, Math.min(lmax, Math.round(length)));
    await this.fetchSnapshot();
  }

  private async fetchSnapshot(): Promise<void> {
    if (!this.job || this.viewLength === null) return;
    const seq = ++this.snapshotSeq;
    const snap = await this.guard(() =>
      this.client.valmap(this.job!.job_id, this.viewLength!));
    if (snap && seq === this.snapshotSeq) {
      this.snapshot = snap;
      this.onChange();
    }
  }

  /** Highlight a motif pair: one overlay per subsequence, straight from the payload. */
  selectPair(pair: MotifPair): void {
    this.selected = pair;
    this.motifSet = null;
    this.overlays = [
      { offset: pair.left, length: pair.length, kind: "pair-left" },
      { offset: pair.right, length: pair.length, kind: "pair-right" },
    ];
    this.onChange();
  }

  clearSelection(): void {
    this.selected = null;
    this.motifSet = null;
    this.overlays = [];
    this.onChange();
  }

  /** Expand the selected pair: one overlay per returned member. */
  async expandSelected(radiusFactor = 2.0): Promise<void> {
    if (!this.job || !this.selected) return;
    const payload = await this.guard(() => this.client.motifSet(this.job!.job_id, {
      length: this.selected!.length,
      left: this.selected!.left,
      right: this.selected!.right,
      radius_factor: radiusFactor,
    }));
    if (!payload) return;
    this.motifSet = payload;
    this.overlays = payload.members.map((m) => ({
      offset: m.offset,
      length: payload.pair.length,
      kind: "member" as const,
    }));
    this.onChange();
  }

  private async guard<T>(action: () => Promise<T>): Promise<T | null> {
    try {
      const result = await action();
      this.lastError = null;
      return result;
    } catch (err) {
      this.lastError = err instanceof Error ? err.message : String(err);
      this.onChange();
      return null;
    }
  }
}
