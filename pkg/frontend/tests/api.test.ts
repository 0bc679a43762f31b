import { describe, expect, it } from "vitest";

import { ServiceClient, ServiceError } from "../src/api.js";
import { mockService } from "./mock_service.js";

describe("service client", () => {
  it("uploads multipart and reads the summary", async () => {
    const { fetchFn, calls } = mockService();
    const client = new ServiceClient("", fetchFn);
    const summary = await client.uploadDataset("demo.txt", "1\n2\n3\n");
    expect(summary.dataset_id).toBe("ds-abc");
    expect(calls[0].method).toBe("POST");
    expect(calls[0].url).toBe("/datasets");
  });

  it("builds snapshot and motif queries", async () => {
    const { fetchFn, calls } = mockService();
    const client = new ServiceClient("", fetchFn);
    await client.valmap("job-000001", 72);
    await client.motifs("job-000001");
    await client.motifs("job-000001", 64);
    expect(calls.map((c) => c.url)).toEqual([
      "/jobs/job-000001/valmap?length=72",
      "/jobs/job-000001/motifs",
      "/jobs/job-000001/motifs?length=64",
    ]);
  });

  it("posts motif-set expansion with the pair body", async () => {
    const { fetchFn, calls } = mockService();
    const client = new ServiceClient("", fetchFn);
    const payload = await client.motifSet("job-000001", {
      length: 64, left: 120, right: 480, radius_factor: 2.5,
    });
    expect(payload.members.length).toBeGreaterThan(0);
    expect(calls[0].body).toEqual({
      length: 64, left: 120, right: 480, radius_factor: 2.5,
    });
  });

  it("surfaces error details with the status code", async () => {
    const client = new ServiceClient("", () =>
      Promise.resolve(new Response(JSON.stringify({ detail: "dataset not found" }),
        { status: 404 })));
    await expect(client.datasetMeta("ds-nope")).rejects.toThrowError(ServiceError);
    await expect(client.datasetMeta("ds-nope")).rejects.toThrow(/404.*dataset not found/);
  });
});
