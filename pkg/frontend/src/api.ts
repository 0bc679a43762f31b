// Thin typed client over the service's HTTP interface. The fetch function is
// injectable so tests can run against a recorded mock.

import type {
  DatasetMeta,
  DatasetSummary,
  JobDescriptor,
  MotifSetPayload,
  MotifsResponse,
  Preview,
  ValmapSnapshot,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(readonly status: number, detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function parse<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      detail = typeof body.detail === "string" ? body.detail : JSON.stringify(body.detail);
    } catch {
      // keep the status text
    }
    throw new ServiceError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class ServiceClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  health(): Promise<{ status: string }> {
    return this.get("/health");
  }

  async uploadDataset(filename: string, content: string, options?: {
    format?: string;
    column?: string;
    delimiter?: string;
  }): Promise<DatasetSummary> {
    const form = new FormData();
    form.append("file", new Blob([content], { type: "text/plain" }), filename);
    if (options?.format) form.append("format", options.format);
    if (options?.column) form.append("column", options.column);
    if (options?.delimiter) form.append("delimiter", options.delimiter);
    const resp = await this.fetchFn(`${this.baseUrl}/datasets`, {
      method: "POST",
      body: form,
    });
    return parse<DatasetSummary>(resp);
  }

  datasetMeta(datasetId: string): Promise<DatasetMeta> {
    return this.get(`/datasets/${datasetId}`);
  }

  preview(datasetId: string, points = 1200): Promise<Preview> {
    return this.get(`/datasets/${datasetId}/preview?points=${points}`);
  }

  async submitJob(body: {
    dataset_id: string;
    lmin: number;
    lmax: number;
    k?: number;
    p?: number;
    exclusion?: number | null;
  }): Promise<{ job_id: string }> {
    const resp = await this.fetchFn(`${this.baseUrl}/jobs`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return parse(resp);
  }

  job(jobId: string): Promise<JobDescriptor> {
    return this.get(`/jobs/${jobId}`);
  }

  valmap(jobId: string, length: number): Promise<ValmapSnapshot> {
    return this.get(`/jobs/${jobId}/valmap?length=${length}`);
  }

  motifs(jobId: string, length?: number): Promise<MotifsResponse> {
    const query = length === undefined ? "" : `?length=${length}`;
    return this.get(`/jobs/${jobId}/motifs${query}`);
  }

  async motifSet(jobId: string, body: {
    length: number;
    left: number;
    right: number;
    radius_factor?: number;
  }): Promise<MotifSetPayload> {
    const resp = await this.fetchFn(`${this.baseUrl}/jobs/${jobId}/motifset`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    return parse(resp);
  }

  private async get<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.baseUrl}${path}`);
    return parse<T>(resp);
  }
}
