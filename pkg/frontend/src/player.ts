/**
 * Plan-driven preview. The service's playback plan fully resolves loop/cut
 * semantics into contiguous visual segments over one continuous audio
 * track; the player only has to answer "what is on screen at time t".
 */

import type { PlanSegmentDoc, PlaybackPlanDoc } from "./types.js";

export interface VisualFrame {
  source: string; // "aroll" or an asset_id
  sourceTimeS: number;
  segment: PlanSegmentDoc;
}

export class PreviewPlayer {
  constructor(readonly plan: PlaybackPlanDoc) {
    if (plan.video.length === 0) throw new Error("empty playback plan");
  }

  get durationS(): number {
    return this.plan.audio.timeline_out_s;
  }

  /** Segment containing t; half-open, with the final segment closed. */
  visualAt(tS: number): VisualFrame {
    const video = this.plan.video;
    let seg = video[video.length - 1]!;
    for (const candidate of video) {
      if (tS >= candidate.timeline_in_s && tS < candidate.timeline_out_s) {
        seg = candidate;
        break;
      }
    }
    return {
      source: seg.source,
      sourceTimeS: seg.source_in_s + (tS - seg.timeline_in_s),
      segment: seg,
    };
  }

  /** Audio is the uninterrupted A-roll: timeline time equals source time. */
  audioAt(tS: number): number {
    return Math.min(Math.max(tS, 0), this.durationS);
  }

  isBrollAt(tS: number): boolean {
    return this.visualAt(tS).source !== "aroll";
  }

  segmentsFor(source: string): PlanSegmentDoc[] {
    return this.plan.video.filter((s) => s.source === source);
  }
}
