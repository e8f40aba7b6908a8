/**
 * DOM glue for the listening test page. All state transitions live in
 * the session/rating modules; this file only wires them to elements.
 */

import { audioUrl, fetchResults, fetchSession, submitScore } from "./api.js";
import {
  RATING_OPTIONS,
  RatingState,
  canSubmit,
  freshRating,
  markPlayedThrough,
  select,
} from "./rating.js";
import {
  SessionView,
  currentIndex,
  currentSample,
  isComplete,
  markScored,
  restore,
  save,
} from "./session.js";
import { renderResults } from "./results.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function listenerId(storage: Storage): string {
  let id = storage.getItem("lpvoc-listener-id");
  if (!id) {
    id = `listener-${Math.random().toString(36).slice(2, 10)}`;
    storage.setItem("lpvoc-listener-id", id);
  }
  return id;
}

export async function boot(): Promise<void> {
  const session = await fetchSession();
  let view: SessionView = restore(session.session_id, session.samples, localStorage);
  let rating: RatingState = freshRating();
  const listener = listenerId(localStorage);

  const audio = el<HTMLAudioElement>("player");
  const progress = el<HTMLElement>("progress");
  const buttons = el<HTMLElement>("rating-buttons");
  const submit = el<HTMLButtonElement>("submit");
  const testPane = el<HTMLElement>("test-pane");
  const donePane = el<HTMLElement>("done-pane");
  const resultsPane = el<HTMLElement>("results-pane");

  for (const option of RATING_OPTIONS) {
    const btn = document.createElement("button");
    btn.textContent = `${option.value} ${option.label}`;
    btn.dataset.value = String(option.value);
    btn.addEventListener("click", () => {
      rating = select(rating, option.value);
      refresh();
    });
    buttons.appendChild(btn);
  }

  audio.addEventListener("ended", () => {
    rating = markPlayedThrough(rating);
    refresh();
  });

  submit.addEventListener("click", async () => {
    const sample = currentSample(view);
    if (sample === null || !canSubmit(rating) || rating.selected === null) return;
    submit.disabled = true;
    try {
      await submitScore(view.sessionId, listener, sample, rating.selected);
    } catch (err) {
      // keep the selection so the listener can just press submit again
      el<HTMLElement>("status").textContent = `submission failed, please retry: ${err}`;
      refresh();
      return;
    }
    el<HTMLElement>("status").textContent = "";
    view = markScored(view, sample, rating.selected);
    save(view, localStorage);
    rating = freshRating();
    refresh();
  });

  el<HTMLButtonElement>("show-results").addEventListener("click", async () => {
    const report = await fetchResults();
    resultsPane.innerHTML = renderResults(report);
    resultsPane.hidden = false;
  });

  function refresh(): void {
    if (isComplete(view)) {
      testPane.hidden = true;
      donePane.hidden = false;
      return;
    }
    const sample = currentSample(view);
    if (sample === null) return;
    progress.textContent = `Sample ${currentIndex(view) + 1} of ${view.order.length}`;
    const url = audioUrl(sample);
    if (!audio.src.endsWith(url)) {
      audio.src = url;
    }
    for (const btn of buttons.querySelectorAll("button")) {
      btn.classList.toggle("selected", Number(btn.dataset.value) === rating.selected);
    }
    submit.disabled = !canSubmit(rating);
  }

  refresh();
}

if (typeof document !== "undefined" && document.getElementById("player")) {
  boot().catch((err) => {
    const status = document.getElementById("status");
    if (status) status.textContent = `failed to start: ${err}`;
  });
}
