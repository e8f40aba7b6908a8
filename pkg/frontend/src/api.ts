/**
 * Thin typed wrappers over the listening-test HTTP API.
 * Served same-origin by the scoring service, so paths are relative.
 */

export interface SessionResponse {
  session_id: string;
  samples: string[];
}

export interface ScoreResponse {
  listener_id: string;
  sample_id: string;
  value: number;
  label: string;
  timestamp: string;
}

export interface FileMean {
  source: string;
  codec: string;
  mean: number;
}

export interface ResultsResponse {
  files: FileMean[];
  codec_averages: Record<string, number>;
  listener_count: number;
}

export async function fetchSession(): Promise<SessionResponse> {
  const res = await fetch("/api/session");
  if (!res.ok) throw new Error(`session request failed: ${res.status}`);
  return res.json();
}

export function audioUrl(sampleId: string): string {
  return `/api/audio/${encodeURIComponent(sampleId)}`;
}

export async function submitScore(
  sessionId: string,
  listenerId: string,
  sampleId: string,
  value: number,
): Promise<ScoreResponse> {
  const res = await fetch("/api/scores", {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({
      session_id: sessionId,
      listener_id: listenerId,
      sample_id: sampleId,
      value,
    }),
  });
  if (!res.ok) throw new Error(`score submission failed: ${res.status}`);
  return res.json();
}

export async function fetchResults(): Promise<ResultsResponse> {
  const res = await fetch("/api/results");
  if (!res.ok) throw new Error(`results request failed: ${res.status}`);
  return res.json();
}
