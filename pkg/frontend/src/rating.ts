/** The five-point opinion scale and the per-sample rating state. */

export interface RatingOption {
  value: number;
  label: string;
}

// fixed mapping, highest first as presented to the listener
export const RATING_OPTIONS: RatingOption[] = [
  { value: 5, label: "Excellent" },
  { value: 4, label: "Good" },
  { value: 3, label: "Fair" },
  { value: 2, label: "Poor" },
  { value: 1, label: "Bad" },
];

export interface RatingState {
  selected: number | null;
  playedThrough: boolean; // full first playback required before scoring
}

export function freshRating(): RatingState {
  return { selected: null, playedThrough: false };
}

export function select(state: RatingState, value: number): RatingState {
  if (!RATING_OPTIONS.some((o) => o.value === value)) {
    throw new Error(`not a valid rating: ${value}`);
  }
  return { ...state, selected: value };
}

export function markPlayedThrough(state: RatingState): RatingState {
  return { ...state, playedThrough: true };
}

export function canSubmit(state: RatingState): boolean {
  return state.selected !== null && state.playedThrough;
}
