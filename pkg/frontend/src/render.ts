/** Thin DOM layer: full redraw of the queue or review view on each change. */

import { ControllerState } from "./controller.js";

function el(tag: string, className: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderBanner(state: ControllerState, root: HTMLElement): void {
  if (state.banner !== null) {
    root.appendChild(el("div", "banner", state.banner));
  }
}

function renderQueue(state: ControllerState, root: HTMLElement): void {
  root.appendChild(el("h1", "title", "Synonym curation"));
  renderBanner(state, root);
  if (state.targets.length === 0 && state.banner === null) {
    root.appendChild(el("p", "empty", "No targets loaded - nothing to review."));
    return;
  }
  const list = el("ul", "queue");
  state.targets.forEach((t, i) => {
    const item = el("li", i === state.focus ? "target focused" : "target");
    item.appendChild(el("span", "name", t.target));
    item.appendChild(el("span", "counts", `${t.total - t.pending}/${t.total} decided`));
    list.appendChild(item);
  });
  root.appendChild(list);
  root.appendChild(
    el("p", "help", "j/k move · Enter open · e export · R retry"),
  );
}

function renderReview(state: ControllerState, root: HTMLElement, progress: { decided: number; total: number }): void {
  root.appendChild(el("h1", "title", state.currentTarget ?? ""));
  renderBanner(state, root);

  const bar = el("div", "progress");
  const fill = el("div", "progress-fill");
  const share = progress.total > 0 ? progress.decided / progress.total : 0;
  fill.style.width = `${Math.round(share * 100)}%`;
  bar.appendChild(fill);
  bar.appendChild(el("span", "progress-label", `${progress.decided}/${progress.total} decided`));
  root.appendChild(bar);

  const table = el("table", "candidates");
  state.rows.forEach((row, i) => {
    const saving =
      state.inflight !== null && state.inflight.candidate === row.candidate;
    const tr = el("tr", i === state.focus ? `row focused ${row.decision}` : `row ${row.decision}`);
    tr.appendChild(el("td", "rank", String(row.rank)));
    tr.appendChild(el("td", "candidate", row.candidate));
    tr.appendChild(el("td", "score", row.score.toFixed(4)));
    tr.appendChild(
      el("td", "decision", saving ? `saving ${state.inflight!.decision}...` : row.decision),
    );
    table.appendChild(tr);
  });
  root.appendChild(table);
  if (state.rows.length < state.total) {
    root.appendChild(el("p", "more", `${state.total - state.rows.length} more below - j to load`));
  }
  root.appendChild(
    el("p", "help", "a accept · r reject · u undo · s skip · n next target · q queue · e export"),
  );
}

export function render(state: ControllerState, progress: { decided: number; total: number }, root: HTMLElement): void {
  root.replaceChildren();
  if (state.view === "queue") {
    renderQueue(state, root);
  } else {
    renderReview(state, root, progress);
  }
}
