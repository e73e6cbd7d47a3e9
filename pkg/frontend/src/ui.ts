/**
 * DOM layer. One EditorView owns a root element and re-renders from the
 * store on every change. All nodes are built with createElement; user
 * content (words, queries, asset ids) never goes through innerHTML.
 *
 * Layout: transcript (word spans with overlay classes), recommendation
 * action bar, search panel with the two style columns, preview strip and
 * toast list. Word spans carry data-index so drag/drop targets resolve to
 * transcript positions.
 */

import type { EditorStore } from "./store.js";
import type { Overlay } from "./overlay.js";
import type { AssetDoc } from "./types.js";

const STYLE_TEXT = `
.cutaway-editor { font-family: sans-serif; }
.cutaway-transcript { line-height: 2.1; }
.cutaway-word { padding: 2px 1px; cursor: pointer; border-radius: 2px; }
.cutaway-word.overlay-green { background: #b5e3b5; }
.cutaway-word.overlay-yellow { background: #f3e296; }
.cutaway-word.overlay-pending { opacity: 0.6; }
.cutaway-thumb { height: 18px; vertical-align: text-bottom; margin-right: 2px; }
.cutaway-grip { cursor: ew-resize; user-select: none; padding: 0 2px; }
.cutaway-toasts { list-style: none; padding: 0; }
.cutaway-toast-error { color: #8b1a1a; }
.cutaway-results { display: flex; gap: 12px; }
.cutaway-results section { flex: 1; }
.cutaway-trash { border: 1px dashed #999; padding: 4px 8px; }
`;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export interface EditorViewOptions {
  /** Horizontal drag scale for resizing, in timeline seconds per pixel. */
  secondsPerPixel?: number;
}

export class EditorView {
  readonly transcriptEl: HTMLElement;
  readonly recsEl: HTMLElement;
  readonly searchEl: HTMLElement;
  readonly toastsEl: HTMLUListElement;
  readonly trashEl: HTMLElement;
  readonly playheadEl: HTMLElement;

  private readonly secondsPerPixel: number;
  private unsubscribe: () => void;
  private resizeDrag: { insertionId: string; startX: number; startDurationS: number } | null =
    null;

  constructor(
    readonly root: HTMLElement,
    readonly store: EditorStore,
    options: EditorViewOptions = {},
  ) {
    this.secondsPerPixel = options.secondsPerPixel ?? 0.05;
    root.classList.add("cutaway-editor");
    const style = el("style");
    style.textContent = STYLE_TEXT;
    root.append(style);

    this.playheadEl = el("div", "cutaway-playhead");
    this.transcriptEl = el("div", "cutaway-transcript");
    this.recsEl = el("div", "cutaway-recs");
    this.searchEl = el("div", "cutaway-search");
    this.trashEl = el("div", "cutaway-trash", "drag here to remove");
    this.toastsEl = el("ul", "cutaway-toasts");
    root.append(
      this.playheadEl,
      this.transcriptEl,
      this.recsEl,
      this.searchEl,
      this.trashEl,
      this.toastsEl,
    );

    this.trashEl.addEventListener("dragover", (ev) => ev.preventDefault());
    this.trashEl.addEventListener("drop", (ev) => {
      ev.preventDefault();
      const id = (ev as DragEvent).dataTransfer?.getData("text/insertion-id");
      if (id) void this.store.removeInsertion(id);
    });
    document.addEventListener("pointermove", this.onPointerMove);
    document.addEventListener("pointerup", this.onPointerUp);

    this.unsubscribe = store.subscribe(() => this.render());
    this.render();
  }

  dispose(): void {
    this.unsubscribe();
    document.removeEventListener("pointermove", this.onPointerMove);
    document.removeEventListener("pointerup", this.onPointerUp);
  }

  private onPointerMove = (ev: PointerEvent): void => {
    if (!this.resizeDrag) return;
    const delta = (ev.clientX - this.resizeDrag.startX) * this.secondsPerPixel;
    this.store.previewResize(
      this.resizeDrag.insertionId,
      this.resizeDrag.startDurationS + delta,
    );
  };

  private onPointerUp = (): void => {
    if (!this.resizeDrag) return;
    const id = this.resizeDrag.insertionId;
    this.resizeDrag = null;
    void this.store.commitResize(id);
  };

  render(): void {
    this.renderPlayhead();
    this.renderTranscript();
    this.renderRecommendations();
    this.renderSearch();
    this.renderToasts();
  }

  private renderPlayhead(): void {
    this.playheadEl.textContent = `playhead ${this.store.playheadS.toFixed(2)} s`;
  }

  private overlayByWord(): Map<number, Overlay> {
    // later overlays win per word; insertions are appended after
    // recommendations by the store, so green paints over yellow
    const byWord = new Map<number, Overlay>();
    for (const overlay of this.store.overlays()) {
      for (const idx of overlay.wordIndices) byWord.set(idx, overlay);
    }
    return byWord;
  }

  private renderTranscript(): void {
    const project = this.store.project;
    this.transcriptEl.replaceChildren();
    if (!project) return;
    const byWord = this.overlayByWord();
    const leadingDone = new Set<string>();

    project.transcript.words.forEach((word, index) => {
      const overlay = byWord.get(index);
      if (
        overlay &&
        overlay.kind === "insertion" &&
        overlay.thumbnailUrl &&
        !leadingDone.has(overlay.id)
      ) {
        leadingDone.add(overlay.id);
        const thumb = el("img", "cutaway-thumb");
        thumb.src = overlay.thumbnailUrl;
        thumb.draggable = true;
        thumb.addEventListener("dragstart", (ev) => {
          ev.dataTransfer?.setData("text/insertion-id", overlay.id);
        });
        this.transcriptEl.append(thumb);
      }

      const span = el("span", "cutaway-word", word.text);
      span.dataset.index = String(index);
      if (overlay) {
        span.classList.add(`overlay-${overlay.color}`);
        span.dataset.overlayId = overlay.id;
        if (overlay.pending) span.classList.add("overlay-pending");
      }
      span.addEventListener("click", () => this.store.clickWord(index));
      span.addEventListener("dragover", (ev) => ev.preventDefault());
      span.addEventListener("drop", (ev) => {
        ev.preventDefault();
        const id = (ev as DragEvent).dataTransfer?.getData("text/insertion-id");
        if (id) void this.store.moveInsertion(id, word.start_s);
      });
      this.transcriptEl.append(span);
      this.transcriptEl.append(document.createTextNode(" "));

      const last = overlay?.wordIndices[overlay.wordIndices.length - 1];
      if (overlay && overlay.kind === "insertion" && last === index) {
        const grip = el("span", "cutaway-grip", "▐");
        grip.dataset.gripFor = overlay.id;
        grip.addEventListener("pointerdown", (ev) => {
          this.resizeDrag = {
            insertionId: overlay.id,
            startX: ev.clientX,
            startDurationS: overlay.end_s - overlay.start_s,
          };
        });
        this.transcriptEl.append(grip);
      }
    });
  }

  private renderRecommendations(): void {
    this.recsEl.replaceChildren();
    this.store.recommendations.forEach((rec, index) => {
      const row = el("div", "cutaway-rec");
      row.append(
        el(
          "span",
          "cutaway-rec-label",
          `${rec.source} @ ${rec.start_s.toFixed(1)} s "${rec.query}"`,
        ),
      );
      const add = el("button", "cutaway-add-now", "Add Now");
      add.dataset.recIndex = String(index);
      add.addEventListener("click", () => {
        const asset = this.firstSearchAsset();
        if (asset) void this.store.acceptRecommendation(rec, asset);
      });
      row.append(add);
      this.recsEl.append(row);
    });
  }

  private firstSearchAsset(): AssetDoc | null {
    const results = this.store.searchResults;
    if (!results) return null;
    return results.social_media[0] ?? results.professional[0] ?? null;
  }

  private renderSearch(): void {
    this.searchEl.replaceChildren();
    const results = this.store.searchResults;
    if (!results) return;
    const wrap = el("div", "cutaway-results");
    for (const [style, assets] of [
      ["social_media", results.social_media],
      ["professional", results.professional],
    ] as const) {
      const column = el("section", `cutaway-col-${style}`);
      column.append(el("h4", undefined, style));
      const list = el("ul");
      for (const asset of assets) {
        const item = el("li", "cutaway-asset", asset.asset_id);
        item.dataset.assetId = asset.asset_id;
        list.append(item);
      }
      column.append(list);
      wrap.append(column);
    }
    this.searchEl.append(wrap);
  }

  private renderToasts(): void {
    this.toastsEl.replaceChildren();
    for (const toast of this.store.toasts) {
      this.toastsEl.append(
        el("li", `cutaway-toast-${toast.kind}`, `${toast.code}: ${toast.message}`),
      );
    }
  }
}
