// Typed client for the local session protocol. Every mutation returns the
// server's refreshed session export; the client never edits one locally.

export interface TrajectorySummary {
  id: string;
  active: boolean;
  energies: number[];
  re_j: number[];
  im_j: number[];
  mull: number[];
  gaps: number[];
}

// poles_by_energy rows are [Re J, Im J, Re residue, Im residue].
export interface SessionExport {
  energies: number[];
  current_energy_index: number;
  poles_by_energy: number[][][];
  trajectories: TrajectorySummary[];
  series: { [name: string]: number[][] };
  config: { [key: string]: unknown };
}

export interface DecompositionRow {
  energy: number;
  sigma_exact: number;
  sigma_pade: number;
  sigma_int: number;
  mull_terms: { [id: string]: number };
  sigma_smooth: number;
  pade_error: number;
}

export interface FinishResponse {
  finished: string;
  session: SessionExport;
}

export type StepChoice = number | 'auto' | 'skip';

export class ProtocolError extends Error {
  constructor(public status: number, detail: string) {
    super(detail);
    this.name = 'ProtocolError';
  }
}

// Narrow structural view of fetch so tests can hand in a fake.
export interface FetchResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: { [k: string]: string }; body?: string },
) => Promise<FetchResponse>;

export class ProtocolClient {
  constructor(
    private base: string = '',
    private fetchFn: FetchLike = (globalThis as { fetch: FetchLike }).fetch,
  ) {}

  private async request(path: string, body?: unknown): Promise<unknown> {
    const init =
      body === undefined
        ? undefined
        : {
            method: 'POST',
            headers: { 'content-type': 'application/json' },
            body: JSON.stringify(body),
          };
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) {
      let detail = `request failed (${resp.status})`;
      try {
        const parsed = (await resp.json()) as { detail?: string };
        if (parsed && typeof parsed.detail === 'string') detail = parsed.detail;
      } catch {
        // error body was not JSON; keep the status message
      }
      throw new ProtocolError(resp.status, detail);
    }
    return resp.json();
  }

  getSession(): Promise<SessionExport> {
    return this.request('/api/session') as Promise<SessionExport>;
  }

  getDecomposition(): Promise<DecompositionRow[]> {
    return this.request('/api/decomposition') as Promise<DecompositionRow[]>;
  }

  seed(energyIndex: number, poleIndex: number): Promise<SessionExport> {
    return this.request('/api/trajectory/seed', {
      energy_index: energyIndex,
      pole_index: poleIndex,
    }) as Promise<SessionExport>;
  }

  step(choice: StepChoice): Promise<SessionExport> {
    return this.request('/api/trajectory/step', { choice }) as Promise<SessionExport>;
  }

  finish(): Promise<FinishResponse> {
    return this.request('/api/trajectory/finish', {}) as Promise<FinishResponse>;
  }
}
