/** Typed client for the curation service HTTP API. */

export type Decision = "accepted" | "rejected" | "pending";

export interface TargetSummary {
  target: string;
  total: number;
  pending: number;
}

export interface TargetsResponse {
  revision: number;
  targets: TargetSummary[];
}

export interface CandidateRow {
  candidate: string;
  score: number;
  rank: number;
  decision: Decision;
}

export interface CandidatesResponse {
  revision: number;
  target: string;
  total: number;
  offset: number;
  rows: CandidateRow[];
}

export type DecisionResult =
  | { ok: true; revision: number }
  | { ok: false; conflict: true; revision: number };

export interface ApiClient {
  getTargets(): Promise<TargetsResponse>;
  getCandidates(target: string, offset: number, limit: number): Promise<CandidatesResponse>;
  postDecision(
    target: string,
    candidate: string,
    decision: Decision,
    expectedRevision: number,
  ): Promise<DecisionResult>;
  getExport(): Promise<string>;
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    throw new Error(`${response.status} ${response.statusText}`);
  }
  return (await response.json()) as T;
}

export function createClient(baseUrl = ""): ApiClient {
  return {
    async getTargets() {
      return asJson<TargetsResponse>(await fetch(`${baseUrl}/api/targets`));
    },

    async getCandidates(target, offset, limit) {
      const query = `offset=${offset}&limit=${limit}`;
      return asJson<CandidatesResponse>(
        await fetch(`${baseUrl}/api/targets/${encodeURIComponent(target)}/candidates?${query}`),
      );
    },

    async postDecision(target, candidate, decision, expectedRevision) {
      const response = await fetch(
        `${baseUrl}/api/targets/${encodeURIComponent(target)}/decisions`,
        {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify({ candidate, decision, expected_revision: expectedRevision }),
        },
      );
      if (response.status === 409) {
        const body = (await response.json()) as { revision: number };
        return { ok: false, conflict: true, revision: body.revision };
      }
      const body = await asJson<{ revision: number }>(response);
      return { ok: true, revision: body.revision };
    },

    async getExport() {
      const response = await fetch(`${baseUrl}/api/export?format=tsv`);
      if (!response.ok) {
        throw new Error(`${response.status} ${response.statusText}`);
      }
      return response.text();
    },
  };
}

/** Date-stamped filename for the thesaurus download. */
export function exportFilename(now: Date): string {
  const y = now.getFullYear();
  const m = String(now.getMonth() + 1).padStart(2, "0");
  const d = String(now.getDate()).padStart(2, "0");
  return `thesaurus-${y}-${m}-${d}.tsv`;
}
