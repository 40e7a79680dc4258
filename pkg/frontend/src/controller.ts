/**
 * Review-loop state machine, independent of the DOM.
 *
 * Row decisions always mirror the last server acknowledgment: a pending
 * write is tracked separately as `inflight` (the render layer shows it as
 * "saving"), committed into the row only on a 2xx, dropped on failure, and
 * resolved by a full refetch on a revision conflict. Actions are applied
 * strictly in order with at most one request on the wire.
 */

import { ApiClient, CandidateRow, Decision, TargetSummary } from "./api.js";

export const PAGE_SIZE = 50;

export type View = "queue" | "review";

export interface ControllerState {
  view: View;
  revision: number;
  targets: TargetSummary[];
  currentTarget: string | null;
  rows: CandidateRow[];
  total: number;
  focus: number; // focused row in review view, focused target in queue view
  inflight: { candidate: string; decision: Decision } | null;
  banner: string | null;
}

export class ReviewController {
  readonly state: ControllerState = {
    view: "queue",
    revision: 0,
    targets: [],
    currentTarget: null,
    rows: [],
    total: 0,
    focus: 0,
    inflight: null,
    banner: null,
  };

  private chain: Promise<void> = Promise.resolve();
  private listeners: Array<() => void> = [];

  constructor(private readonly api: ApiClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Serializes actions so only one request is in flight at a time. */
  private enqueue(action: () => Promise<void>): Promise<void> {
    this.chain = this.chain.then(action, action);
    return this.chain;
  }

  loadTargets(): Promise<void> {
    return this.enqueue(async () => {
      try {
        const body = await this.api.getTargets();
        this.state.targets = body.targets;
        this.state.revision = body.revision;
        this.state.banner = null;
      } catch (err) {
        this.state.banner = `network failure loading targets - press R to retry (${String(err)})`;
      }
      this.notify();
    });
  }

  openTarget(target: string): Promise<void> {
    return this.enqueue(async () => {
      try {
        const body = await this.api.getCandidates(target, 0, PAGE_SIZE);
        this.state.view = "review";
        this.state.currentTarget = target;
        this.state.rows = body.rows;
        this.state.total = body.total;
        this.state.revision = body.revision;
        this.state.focus = 0;
        this.state.banner = null;
      } catch (err) {
        this.state.banner = `network failure loading ${target} - press R to retry (${String(err)})`;
      }
      this.notify();
    });
  }

  loadMore(): Promise<void> {
    return this.enqueue(async () => {
      const target = this.state.currentTarget;
      if (target === null || this.state.rows.length >= this.state.total) return;
      try {
        const body = await this.api.getCandidates(target, this.state.rows.length, PAGE_SIZE);
        this.state.rows = this.state.rows.concat(body.rows);
        this.state.revision = body.revision;
      } catch (err) {
        this.state.banner = `network failure loading more rows (${String(err)})`;
      }
      this.notify();
    });
  }

  /** Accept/reject/reset the focused candidate. */
  decide(decision: Decision): Promise<void> {
    return this.enqueue(async () => {
      const target = this.state.currentTarget;
      const row = this.state.rows[this.state.focus];
      if (target === null || row === undefined) return;
      this.state.inflight = { candidate: row.candidate, decision };
      this.notify();
      try {
        const result = await this.api.postDecision(
          target,
          row.candidate,
          decision,
          this.state.revision,
        );
        if (result.ok) {
          const before = row.decision;
          row.decision = decision;
          this.state.revision = result.revision;
          this.adjustPending(target, before, decision);
          this.advanceFocus();
          this.state.banner = null;
        } else {
          // stale revision: someone else wrote; refetch and replay focus
          this.state.banner = "edited elsewhere - view refreshed, decision not applied";
          await this.resync(target, row.candidate);
        }
      } catch (err) {
        // network failure: the optimistic marker is dropped, row unchanged
        this.state.banner = `decision not saved - ${String(err)}`;
      } finally {
        this.state.inflight = null;
        this.notify();
      }
    });
  }

  private async resync(target: string, focusCandidate: string): Promise<void> {
    const limit = Math.max(this.state.rows.length, PAGE_SIZE);
    const body = await this.api.getCandidates(target, 0, limit);
    this.state.rows = body.rows;
    this.state.total = body.total;
    this.state.revision = body.revision;
    const index = body.rows.findIndex((r) => r.candidate === focusCandidate);
    this.state.focus = index >= 0 ? index : 0;
    const refreshed = await this.api.getTargets();
    this.state.targets = refreshed.targets;
  }

  private adjustPending(target: string, before: Decision, after: Decision): void {
    const summary = this.state.targets.find((t) => t.target === target);
    if (summary === undefined) return;
    summary.pending += (after === "pending" ? 1 : 0) - (before === "pending" ? 1 : 0);
  }

  private advanceFocus(): void {
    const next = this.state.rows.findIndex(
      (r, i) => i > this.state.focus && r.decision === "pending",
    );
    if (next >= 0) {
      this.state.focus = next;
    } else if (this.state.focus < this.state.rows.length - 1) {
      this.state.focus += 1;
    }
  }

  moveFocus(delta: number): void {
    const bound = this.state.view === "review" ? this.state.rows.length : this.state.targets.length;
    const next = this.state.focus + delta;
    if (next >= 0 && next < bound) {
      this.state.focus = next;
      this.notify();
    } else if (
      this.state.view === "review" &&
      next >= this.state.rows.length &&
      this.state.rows.length < this.state.total
    ) {
      void this.loadMore().then(() => {
        if (this.state.focus + delta < this.state.rows.length) {
          this.state.focus += delta;
          this.notify();
        }
      });
    }
  }

  skip(): void {
    this.moveFocus(1);
  }

  backToQueue(): Promise<void> {
    this.state.view = "queue";
    this.state.currentTarget = null;
    this.state.rows = [];
    this.state.total = 0;
    this.state.focus = 0;
    this.notify();
    return this.loadTargets();
  }

  /** Open the target after the current one in queue order. */
  nextTarget(): Promise<void> {
    const order = this.state.targets.map((t) => t.target);
    if (order.length === 0) return Promise.resolve();
    const current = this.state.currentTarget;
    const at = current === null ? -1 : order.indexOf(current);
    return this.openTarget(order[(at + 1) % order.length]);
  }

  /** Decided/total for the current target, from server-acknowledged counts. */
  progress(): { decided: number; total: number } {
    const summary = this.state.targets.find((t) => t.target === this.state.currentTarget);
    if (summary === undefined) {
      return { decided: 0, total: this.state.total };
    }
    return { decided: summary.total - summary.pending, total: summary.total };
  }

  retry(): Promise<void> {
    if (this.state.view === "review" && this.state.currentTarget !== null) {
      return this.openTarget(this.state.currentTarget);
    }
    return this.loadTargets();
  }

  /** Keyboard map; every review interaction is reachable from here. */
  handleKey(key: string): Promise<void> | void {
    switch (key) {
      case "a":
        return this.decide("accepted");
      case "r":
      case "x":
        return this.decide("rejected");
      case "u":
        return this.decide("pending");
      case "s":
        return this.skip();
      case "j":
      case "ArrowDown":
        return this.moveFocus(1);
      case "k":
      case "ArrowUp":
        return this.moveFocus(-1);
      case "n":
        return this.nextTarget();
      case "R":
        return this.retry();
      case "q":
      case "Escape":
        return this.backToQueue();
      case "Enter":
        if (this.state.view === "queue" && this.state.targets.length > 0) {
          const pick = this.state.targets[this.state.focus] ?? this.state.targets[0];
          return this.openTarget(pick.target);
        }
        return;
      default:
        return;
    }
  }
}
