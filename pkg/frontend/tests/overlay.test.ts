import { describe, expect, it } from "vitest";

import {
  clampResize,
  insertionOverlay,
  intersectingWordIndices,
  nextInsertionStart,
  recommendationOverlay,
} from "../src/overlay";
import type { InsertionDoc, TranscriptDoc } from "../src/types";
import { makeAsset, makeTranscriptWords } from "./fakeService";

function doc(words = makeTranscriptWords(40)): TranscriptDoc {
  return { video_id: "clip", duration_s: 30, language: "en", words };
}

function insertion(startS: number, durationS: number): InsertionDoc {
  return {
    insertion_id: "ins-0001",
    asset: makeAsset(),
    start_s: startS,
    duration_s: durationS,
    origin: "manual",
  };
}

describe("intersectingWordIndices", () => {
  it("covers exactly the words whose half-open span intersects", () => {
    // words at 0.25 + 0.45 i, width 0.35; [9.0, 11.0) hits 19..23
    expect(intersectingWordIndices(doc(), 9.0, 11.0)).toEqual([
      19, 20, 21, 22, 23,
    ]);
  });

  it("treats touching boundaries as outside", () => {
    const words = [
      { text: "before", start_s: 8.5, end_s: 9.0, pos: null },
      { text: "in", start_s: 10.9, end_s: 11.0, pos: null },
      { text: "after", start_s: 11.0, end_s: 11.5, pos: null },
    ];
    expect(intersectingWordIndices(doc(words), 9.0, 11.0)).toEqual([1]);
  });

  it("is empty in silence", () => {
    expect(intersectingWordIndices(doc(), 25.0, 26.0)).toEqual([]);
  });
});

describe("overlay construction", () => {
  it("insertions are green and carry the asset", () => {
    const o = insertionOverlay(doc(), insertion(9.0, 2.0));
    expect(o.color).toBe("green");
    expect(o.kind).toBe("insertion");
    expect(o.wordIndices).toEqual([19, 20, 21, 22, 23]);
    expect(o.label).toBe("gif-001");
    expect(o.thumbnailUrl).toContain("thumb");
    expect(o.pending).toBe(false);
  });

  it("a duration override reshapes the covered words", () => {
    const o = insertionOverlay(doc(), insertion(9.0, 2.0), 0.5);
    expect(o.end_s).toBeCloseTo(9.5);
    expect(o.wordIndices).toEqual([19, 20]);
  });

  it("recommendations are yellow and labeled by query", () => {
    const o = recommendationOverlay(
      doc(),
      {
        start_s: 9.0,
        duration_s: 2.0,
        query: "coffee",
        source: "interval",
        score: null,
        anchor_word_index: 19,
      },
      0,
    );
    expect(o.color).toBe("yellow");
    expect(o.label).toBe("coffee");
    expect(o.wordIndices).toEqual([19, 20, 21, 22, 23]);
  });

  it("marks optimistic insertions pending", () => {
    const ins = { ...insertion(9.0, 2.0), insertion_id: "pending-1" };
    expect(insertionOverlay(doc(), ins).pending).toBe(true);
  });
});

describe("clampResize", () => {
  it("never exceeds 8 seconds", () => {
    expect(clampResize(12.0, 5.0, 30.0)).toBe(8.0);
  });

  it("never shrinks below half a second", () => {
    expect(clampResize(0.1, 5.0, 30.0)).toBe(0.5);
  });

  it("stops at the video end", () => {
    expect(clampResize(12.0, 27.0, 30.0)).toBe(3.0);
  });

  it("stops at the next insertion", () => {
    expect(clampResize(12.0, 5.0, 30.0, 9.0)).toBe(4.0);
  });

  it("passes reasonable values through", () => {
    expect(clampResize(3.5, 5.0, 30.0, 20.0)).toBe(3.5);
  });
});

describe("nextInsertionStart", () => {
  const list = [insertion(2.0, 1.0), { ...insertion(10.0, 2.0), insertion_id: "b" }];

  it("finds the nearest later start, skipping the dragged one", () => {
    expect(nextInsertionStart(list, 2.0, "ins-0001")).toBe(10.0);
  });

  it("is undefined past the last insertion", () => {
    expect(nextInsertionStart(list, 10.0, "b")).toBeUndefined();
  });
});
