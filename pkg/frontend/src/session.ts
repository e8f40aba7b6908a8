/**
 * Session progression: samples are presented in server order and the
 * cursor only advances once the current sample has a submitted score.
 * The state holds nothing but sample ids and completion flags, so
 * nothing about codec identity can leak into it.
 */

export interface SessionView {
  sessionId: string;
  order: string[];
  scored: Record<string, number>; // sampleId -> submitted value
}

export function newSession(sessionId: string, order: string[]): SessionView {
  return { sessionId, order, scored: {} };
}

/** Index of the first unscored sample; order.length when all are done. */
export function currentIndex(view: SessionView): number {
  for (let i = 0; i < view.order.length; i++) {
    if (!(view.order[i] in view.scored)) return i;
  }
  return view.order.length;
}

export function currentSample(view: SessionView): string | null {
  const i = currentIndex(view);
  return i < view.order.length ? view.order[i] : null;
}

export function isComplete(view: SessionView): boolean {
  return currentIndex(view) === view.order.length;
}

/** Record a submitted score and advance. Rejects out-of-order marks. */
export function markScored(view: SessionView, sampleId: string, value: number): SessionView {
  if (sampleId !== currentSample(view)) {
    throw new Error("can only score the current sample");
  }
  return { ...view, scored: { ...view.scored, [sampleId]: value } };
}

const STORAGE_KEY = "lpvoc-mos-session";

export function save(view: SessionView, storage: Storage): void {
  storage.setItem(STORAGE_KEY, JSON.stringify(view));
}

/**
 * Restore a saved session if it matches the server's current one;
 * a reload then resumes at the first unscored sample.
 */
export function restore(
  sessionId: string,
  order: string[],
  storage: Storage,
): SessionView {
  const raw = storage.getItem(STORAGE_KEY);
  if (raw) {
    try {
      const saved = JSON.parse(raw) as SessionView;
      if (
        saved.sessionId === sessionId &&
        JSON.stringify(saved.order) === JSON.stringify(order)
      ) {
        return saved;
      }
    } catch {
      // fall through to a fresh session
    }
  }
  return newSession(sessionId, order);
}
