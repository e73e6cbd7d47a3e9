/**
 * Transcript overlay math. Overlays are anchored to words: an overlay covers
 * exactly the words whose half-open [start_s, end_s) span intersects the
 * overlay's half-open time range. Insertions render green, recommendations
 * yellow, matching the editing conventions the service enforces.
 */

import type {
  InsertionDoc,
  RecommendationDoc,
  TranscriptDoc,
} from "./types.js";

export const MIN_INSERTION_S = 0.5;
export const MAX_INSERTION_S = 8.0;

export type OverlayKind = "insertion" | "recommendation";

export interface Overlay {
  kind: OverlayKind;
  color: "green" | "yellow";
  id: string;
  start_s: number;
  end_s: number;
  wordIndices: number[];
  label: string;
  thumbnailUrl: string;
  pending: boolean;
}

/** Indices of words whose [start_s, end_s) intersects [startS, endS). */
export function intersectingWordIndices(
  doc: TranscriptDoc,
  startS: number,
  endS: number,
): number[] {
  const out: number[] = [];
  for (let i = 0; i < doc.words.length; i++) {
    const w = doc.words[i]!;
    if (w.start_s < endS && w.end_s > startS) out.push(i);
  }
  return out;
}

export function insertionOverlay(
  doc: TranscriptDoc,
  ins: InsertionDoc,
  durationOverrideS?: number,
): Overlay {
  const duration = durationOverrideS ?? ins.duration_s;
  const end = ins.start_s + duration;
  return {
    kind: "insertion",
    color: "green",
    id: ins.insertion_id,
    start_s: ins.start_s,
    end_s: end,
    wordIndices: intersectingWordIndices(doc, ins.start_s, end),
    label: ins.asset.asset_id,
    thumbnailUrl: ins.asset.thumbnail_url,
    pending: ins.insertion_id.startsWith("pending-"),
  };
}

export function recommendationOverlay(
  doc: TranscriptDoc,
  rec: RecommendationDoc,
  index: number,
): Overlay {
  const end = rec.start_s + rec.duration_s;
  return {
    kind: "recommendation",
    color: "yellow",
    id: `rec-${rec.source}-${index}`,
    start_s: rec.start_s,
    end_s: end,
    wordIndices: intersectingWordIndices(doc, rec.start_s, end),
    label: rec.query,
    thumbnailUrl: "",
    pending: false,
  };
}

/**
 * Mirror of the service's resize rule so drag previews can never show a
 * state the service would reject: clamp to [0.5, 8.0], then to the video
 * end, then to the next insertion's start.
 */
export function clampResize(
  requestedS: number,
  startS: number,
  videoDurationS: number,
  nextStartS?: number,
): number {
  let d = Math.min(Math.max(requestedS, MIN_INSERTION_S), MAX_INSERTION_S);
  d = Math.min(d, videoDurationS - startS);
  if (nextStartS !== undefined) d = Math.min(d, nextStartS - startS);
  return d;
}

/** Start of the nearest insertion after startS, skipping `exceptId`. */
export function nextInsertionStart(
  insertions: InsertionDoc[],
  startS: number,
  exceptId: string,
): number | undefined {
  let next: number | undefined;
  for (const ins of insertions) {
    if (ins.insertion_id === exceptId) continue;
    if (ins.start_s > startS + 1e-6 && (next === undefined || ins.start_s < next)) {
      next = ins.start_s;
    }
  }
  return next;
}
