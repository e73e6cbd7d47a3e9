/**
 * Editor state with optimistic mutations. Every mutation snapshots the last
 * acknowledged project, applies the change locally for instant feedback,
 * sends the revisioned request, then reconciles: success refreshes from the
 * service, failure restores the snapshot and surfaces a toast. After either
 * path settles the UI only ever shows service-acknowledged state.
 */

import { ApiClient, ApiError } from "./api.js";
import {
  clampResize,
  insertionOverlay,
  nextInsertionStart,
  recommendationOverlay,
  type Overlay,
} from "./overlay.js";
import type {
  AssetDoc,
  InsertionDoc,
  ProjectPayload,
  RecommendationDoc,
  SearchResults,
} from "./types.js";

export interface Toast {
  kind: "error" | "info";
  code: string;
  message: string;
}

export type Listener = () => void;

function clone<T>(value: T): T {
  return JSON.parse(JSON.stringify(value)) as T;
}

export class EditorStore {
  project: ProjectPayload | null = null;
  recommendations: RecommendationDoc[] = [];
  searchQuery = "";
  searchResults: SearchResults | null = null;
  playheadS = 0;
  toasts: Toast[] = [];
  /** Live resize drag: shown instead of the acknowledged duration. */
  resizePreviewFor: { insertionId: string; durationS: number } | null = null;

  private listeners: Listener[] = [];
  private pendingSeq = 0;

  constructor(private readonly api: ApiClient) {}

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private emit(): void {
    for (const fn of this.listeners) fn();
  }

  private get proj(): ProjectPayload {
    if (!this.project) throw new Error("no project loaded");
    return this.project;
  }

  async open(projectId: string): Promise<void> {
    this.project = await this.api.getProject(projectId);
    this.emit();
  }

  async refresh(): Promise<void> {
    this.project = await this.api.getProject(this.proj.project_id);
    this.emit();
  }

  async loadRecommendations(source: string, limit?: number): Promise<void> {
    const res = await this.api.recommendations(
      this.proj.project_id,
      source,
      limit,
    );
    this.recommendations = res.items;
    this.emit();
  }

  async search(q: string, style = "both"): Promise<void> {
    this.searchQuery = q;
    const res = await this.api.search(this.proj.project_id, q, style);
    this.searchResults = res.results;
    this.emit();
  }

  /** Green insertion overlays over yellow recommendation overlays. */
  overlays(): Overlay[] {
    if (!this.project) return [];
    const doc = this.project.transcript;
    const out: Overlay[] = [];
    this.recommendations.forEach((rec, i) => {
      out.push(recommendationOverlay(doc, rec, i));
    });
    for (const ins of this.project.insertions) {
      const preview =
        this.resizePreviewFor?.insertionId === ins.insertion_id
          ? this.resizePreviewFor.durationS
          : undefined;
      out.push(insertionOverlay(doc, ins, preview));
    }
    return out;
  }

  clickWord(wordIndex: number): void {
    const word = this.proj.transcript.words[wordIndex];
    if (!word) return;
    this.playheadS = word.start_s;
    this.emit();
  }

  private toastError(err: unknown): void {
    if (err instanceof ApiError) {
      this.toasts.push({ kind: "error", code: err.code, message: err.message });
    } else {
      this.toasts.push({
        kind: "error",
        code: "error",
        message: err instanceof Error ? err.message : String(err),
      });
    }
  }

  private async rollback(snapshot: ProjectPayload, err: unknown): Promise<void> {
    this.project = snapshot;
    this.toastError(err);
    if (err instanceof ApiError && err.code === "revision_conflict") {
      // someone else won the race; resync to their acknowledged state
      await this.refresh();
      return;
    }
    this.emit();
  }

  private insertSorted(ins: InsertionDoc): void {
    const list = [...this.proj.insertions, ins];
    list.sort((a, b) => a.start_s - b.start_s);
    this.proj.insertions = list;
  }

  /**
   * "Add Now": convert a recommendation into an insertion over the
   * recommended span. The service derives the initial duration from the
   * asset, so a follow-up resize aligns it with the recommendation.
   */
  async acceptRecommendation(
    rec: RecommendationDoc,
    asset: AssetDoc,
  ): Promise<void> {
    const snapshot = clone(this.proj);
    const tempId = `pending-${++this.pendingSeq}`;
    this.insertSorted({
      insertion_id: tempId,
      asset,
      start_s: rec.start_s,
      duration_s: rec.duration_s,
      origin: `recommendation:${rec.source}`,
    });
    this.emit();
    try {
      const ack = await this.api.insert(this.proj.project_id, {
        asset,
        at_s: rec.start_s,
        expected_revision: snapshot.revision,
        origin: `recommendation:${rec.source}`,
      });
      await this.refresh();
      const acked = this.proj.insertions.find(
        (i) => i.insertion_id === ack.insertion_id,
      );
      if (acked && Math.abs(acked.duration_s - rec.duration_s) > 1e-6) {
        await this.api.patchInsertion(this.proj.project_id, ack.insertion_id, {
          expected_revision: this.proj.revision,
          duration_s: rec.duration_s,
        });
        await this.refresh();
      }
    } catch (err) {
      await this.rollback(snapshot, err);
    }
  }

  async insertManual(asset: AssetDoc, atS: number): Promise<void> {
    const snapshot = clone(this.proj);
    this.insertSorted({
      insertion_id: `pending-${++this.pendingSeq}`,
      asset,
      start_s: atS,
      duration_s: Math.min(Math.max(asset.natural_duration_s, 0.5), 8.0),
      origin: "manual",
    });
    this.emit();
    try {
      await this.api.insert(this.proj.project_id, {
        asset,
        at_s: atS,
        expected_revision: snapshot.revision,
      });
      await this.refresh();
    } catch (err) {
      await this.rollback(snapshot, err);
    }
  }

  async moveInsertion(insertionId: string, newStartS: number): Promise<void> {
    const snapshot = clone(this.proj);
    const ins = this.proj.insertions.find(
      (i) => i.insertion_id === insertionId,
    );
    if (!ins) return;
    ins.start_s = newStartS;
    this.proj.insertions.sort((a, b) => a.start_s - b.start_s);
    this.emit();
    try {
      await this.api.patchInsertion(this.proj.project_id, insertionId, {
        expected_revision: snapshot.revision,
        start_s: newStartS,
      });
      await this.refresh();
    } catch (err) {
      await this.rollback(snapshot, err);
    }
  }

  /**
   * Live drag feedback: the preview is clamped exactly the way the service
   * will clamp the committed value, so the overlay can never stretch past
   * 8 s, the video end, or the next insertion.
   */
  previewResize(insertionId: string, requestedS: number): number {
    const ins = this.proj.insertions.find(
      (i) => i.insertion_id === insertionId,
    );
    if (!ins) return requestedS;
    const clamped = clampResize(
      requestedS,
      ins.start_s,
      this.proj.duration_s,
      nextInsertionStart(this.proj.insertions, ins.start_s, insertionId),
    );
    this.resizePreviewFor = { insertionId, durationS: clamped };
    this.emit();
    return clamped;
  }

  async commitResize(insertionId: string): Promise<void> {
    const preview = this.resizePreviewFor;
    this.resizePreviewFor = null;
    if (!preview || preview.insertionId !== insertionId) return;
    const snapshot = clone(this.proj);
    const ins = this.proj.insertions.find(
      (i) => i.insertion_id === insertionId,
    );
    if (!ins) return;
    ins.duration_s = preview.durationS;
    this.emit();
    try {
      await this.api.patchInsertion(this.proj.project_id, insertionId, {
        expected_revision: snapshot.revision,
        duration_s: preview.durationS,
      });
      await this.refresh();
    } catch (err) {
      await this.rollback(snapshot, err);
    }
  }

  async removeInsertion(insertionId: string): Promise<void> {
    const snapshot = clone(this.proj);
    this.proj.insertions = this.proj.insertions.filter(
      (i) => i.insertion_id !== insertionId,
    );
    this.emit();
    try {
      await this.api.deleteInsertion(
        this.proj.project_id,
        insertionId,
        snapshot.revision,
      );
      await this.refresh();
    } catch (err) {
      await this.rollback(snapshot, err);
    }
  }
}
