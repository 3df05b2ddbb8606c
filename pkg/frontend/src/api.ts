// Typed client for the slice server. Each chart owns one channel with
// latest-wins cancellation: a new request aborts the in-flight one.

export interface Meta {
  M: number;
  N: number;
  K: number;
  labels: string[];
  bounds: { lower: number[]; upper: number[] };
  eta: number[];
  has_table_source: boolean;
  grid_scheme: string;
}

export interface MarginalStat {
  length_normalized: number;
  length_raw: number;
  point: number[];
}

export interface MarginalResponse {
  weights: number[];
  direction_raw: number[];
  stats: Record<string, MarginalStat>;
  exact: boolean;
  angular_error_rad: number;
}

export interface SlicePolyline {
  lengths: number[];
  points_normalized: number[][];
  points_raw: number[][];
  fixed_raw: number[][];
}

export interface SliceResponse {
  i: number;
  j: number;
  v: number[];
  scale: number;
  angles: number[];
  polylines: Record<string, SlicePolyline>;
  exact: boolean;
  max_angular_error_rad: number;
}

export interface DecideResponse {
  input_id: string | number;
  loss: number;
  losses: Record<string, number>;
  samples: number[][];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
  }
}

async function parseOrThrow<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = await res.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      // keep the status text
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class Channel {
  private inflight: AbortController | null = null;

  constructor(private readonly base: string) {}

  async get<T>(pathAndQuery: string): Promise<T> {
    if (this.inflight) this.inflight.abort();
    const controller = new AbortController();
    this.inflight = controller;
    try {
      const res = await fetch(`${this.base}${pathAndQuery}`, { signal: controller.signal });
      return await parseOrThrow<T>(res);
    } finally {
      if (this.inflight === controller) this.inflight = null;
    }
  }
}

export async function getMeta(base: string): Promise<Meta> {
  return parseOrThrow<Meta>(await fetch(`${base}/meta`));
}

export async function postDecide(
  base: string,
  target: number[],
  scoring = "squared",
): Promise<DecideResponse> {
  const res = await fetch(`${base}/decide`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ target, scoring }),
  });
  return parseOrThrow<DecideResponse>(res);
}
