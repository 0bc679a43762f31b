// Payload shapes served by the analysis service. The client never derives
// distances itself; everything rendered comes from these objects.

export interface DatasetSummary {
  dataset_id: string;
  name: string;
  length: number;
}

export interface DatasetMeta extends DatasetSummary {
  min: number;
  max: number;
  mean: number;
}

export interface Preview {
  dataset_id: string;
  from: number;
  to: number;
  offsets: number[];
  values: number[];
}

export interface JobParams {
  dataset_id: string;
  lmin: number;
  lmax: number;
  k: number;
  p: number;
  exclusion: number | null;
}

export type JobState = "queued" | "running" | "done" | "failed";

export interface JobDescriptor {
  job_id: string;
  dataset_id: string;
  params: JobParams;
  state: JobState;
  current_length: number | null;
  error: string | null;
  created_at: number;
  started_at: number | null;
  finished_at: number | null;
}

export interface Checkpoint {
  length: number;
  offset: number;
  old_dn: number | null;
  new_dn: number;
  new_ip: number;
  new_lp: number;
}

export interface ValmapSnapshot {
  lmin: number;
  lmax: number;
  view_length: number;
  mpn: (number | null)[];
  ip: number[];
  lp: number[];
  checkpoints: Checkpoint[];
}

export interface MotifPair {
  left: number;
  right: number;
  length: number;
  distance: number;
  norm_distance: number;
}

export interface MotifsResponse {
  job_id: string;
  length: number | null;
  pairs: MotifPair[];
}

export interface MotifSetMember {
  offset: number;
  distance: number;
}

export interface MotifSetPayload {
  pair: MotifPair;
  radius: number;
  exclusion: number;
  members: MotifSetMember[];
}
