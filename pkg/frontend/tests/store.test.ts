import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { EditorStore } from "../src/store";
import type { RecommendationDoc } from "../src/types";
import { FakeService, makeAsset, makeProject } from "./fakeService";

const INTERVAL_REC: RecommendationDoc = {
  start_s: 9.0,
  duration_s: 2.0,
  query: "w20",
  source: "interval",
  score: null,
  anchor_word_index: 20,
};

let fake: FakeService;
let store: EditorStore;

beforeEach(async () => {
  fake = new FakeService(makeProject(30, 40));
  store = new EditorStore(new ApiClient("http://fake.test", fake.fetch));
  await store.open("p-0001");
});

function acked() {
  return JSON.parse(JSON.stringify(fake.project));
}

describe("accepting a recommendation", () => {
  it("produces a green overlay over exactly the intersecting words", async () => {
    await store.acceptRecommendation(INTERVAL_REC, makeAsset("gif-001", 2.4));

    // service acknowledged: inserted at 9.0 then resized to the
    // recommended 2.0 s
    expect(store.project).toEqual(acked());
    const ins = store.project!.insertions;
    expect(ins).toHaveLength(1);
    expect(ins[0]!.start_s).toBe(9.0);
    expect(ins[0]!.duration_s).toBe(2.0);
    expect(ins[0]!.origin).toBe("recommendation:interval");

    const greens = store.overlays().filter((o) => o.color === "green");
    expect(greens).toHaveLength(1);
    // words at 0.25 + 0.45 i, width 0.35: [9.0, 11.0) intersects 19..23
    expect(greens[0]!.wordIndices).toEqual([19, 20, 21, 22, 23]);
    expect(greens[0]!.pending).toBe(false);
  });

  it("shows the overlay optimistically before the service replies", async () => {
    let release!: () => void;
    const gate = new Promise<void>((r) => {
      release = r;
    });
    const gatedFetch: typeof fake.fetch = async (url, init) => {
      if (init?.method === "POST") await gate;
      return fake.fetch(url, init);
    };
    const gated = new EditorStore(new ApiClient("http://fake.test", gatedFetch));
    await gated.open("p-0001");

    const done = gated.acceptRecommendation(INTERVAL_REC, makeAsset());
    const pendingGreens = gated.overlays().filter((o) => o.color === "green");
    expect(pendingGreens).toHaveLength(1);
    expect(pendingGreens[0]!.pending).toBe(true);
    expect(pendingGreens[0]!.wordIndices).toEqual([19, 20, 21, 22, 23]);

    release();
    await done;
    expect(gated.overlays().filter((o) => o.color === "green")[0]!.pending).toBe(
      false,
    );
  });

  it("rolls back the optimistic insertion when the service rejects it", async () => {
    await store.acceptRecommendation(INTERVAL_REC, makeAsset("gif-001", 2.4));
    const before = acked();

    // a second accept at the same spot must overlap
    await store.acceptRecommendation(INTERVAL_REC, makeAsset("gif-002", 3.0));

    expect(store.project).toEqual(before);
    expect(store.project!.insertions).toHaveLength(1);
    expect(store.toasts.at(-1)).toMatchObject({ kind: "error", code: "overlap" });
  });
});

describe("resize", () => {
  it("visually clamps a drag beyond 8 seconds", async () => {
    await store.insertManual(makeAsset("gif-001", 2.0), 5.0);
    const id = store.project!.insertions[0]!.insertion_id;

    const shown = store.previewResize(id, 12.0);
    expect(shown).toBe(8.0);
    const overlay = store.overlays().find((o) => o.id === id)!;
    expect(overlay.end_s - overlay.start_s).toBe(8.0);
  });

  it("clamps the preview at the next insertion and the video end", async () => {
    await store.insertManual(makeAsset("gif-001", 2.0), 5.0);
    await store.insertManual(makeAsset("gif-002", 2.0), 9.0);
    const [a, b] = store.project!.insertions.map((i) => i.insertion_id);

    expect(store.previewResize(a!, 12.0)).toBe(4.0);
    expect(store.previewResize(b!, 40.0)).toBe(8.0);
    await store.commitResize(b!);
    expect(store.project!.insertions[1]!.duration_s).toBe(8.0);
    expect(store.project).toEqual(acked());
  });

  it("commits the clamped duration, not the raw drag", async () => {
    await store.insertManual(makeAsset("gif-001", 2.0), 5.0);
    const id = store.project!.insertions[0]!.insertion_id;
    store.previewResize(id, 99.0);
    await store.commitResize(id);

    expect(store.project!.insertions[0]!.duration_s).toBe(8.0);
    expect(store.resizePreviewFor).toBeNull();
    expect(store.project).toEqual(acked());
  });
});

describe("move", () => {
  it("rolls back onto the acknowledged state after an overlap error", async () => {
    await store.insertManual(makeAsset("gif-001", 2.0), 2.0);
    await store.insertManual(makeAsset("gif-002", 2.0), 10.0);
    const before = acked();
    const b = store.project!.insertions[1]!.insertion_id;

    await store.moveInsertion(b, 3.0); // lands on gif-001's footprint

    expect(store.toasts.at(-1)).toMatchObject({ kind: "error", code: "overlap" });
    expect(store.project).toEqual(before);
    expect(store.project!.insertions[1]!.start_s).toBe(10.0);
  });

  it("applies an acknowledged move", async () => {
    await store.insertManual(makeAsset("gif-001", 2.0), 2.0);
    const id = store.project!.insertions[0]!.insertion_id;
    await store.moveInsertion(id, 20.0);
    expect(store.project!.insertions[0]!.start_s).toBe(20.0);
    expect(store.project).toEqual(acked());
  });
});

describe("revision conflicts", () => {
  it("resyncs from the service after a conflict", async () => {
    await store.insertManual(makeAsset("gif-001", 2.0), 2.0);
    const id = store.project!.insertions[0]!.insertion_id;

    // another client moved the project forward underneath us
    fake.project.revision += 1;
    await store.moveInsertion(id, 20.0);

    expect(store.toasts.at(-1)).toMatchObject({
      kind: "error",
      code: "revision_conflict",
    });
    // settled on the acknowledged state, including the foreign revision
    expect(store.project).toEqual(acked());
    expect(store.project!.insertions[0]!.start_s).toBe(2.0);
  });
});

describe("removal and navigation", () => {
  it("removes through the service", async () => {
    await store.insertManual(makeAsset("gif-001", 2.0), 2.0);
    const id = store.project!.insertions[0]!.insertion_id;
    await store.removeInsertion(id);
    expect(store.project!.insertions).toHaveLength(0);
    expect(store.project).toEqual(acked());
  });

  it("clicking a word moves the playhead to its start", () => {
    store.clickWord(20);
    expect(store.playheadS).toBeCloseTo(0.25 + 20 * 0.45);
  });

  it("loads recommendations and search results", async () => {
    fake.recommendations = [INTERVAL_REC];
    await store.loadRecommendations("interval");
    expect(store.recommendations).toHaveLength(1);
    await store.search("happiness");
    expect(store.searchResults!.social_media[0]!.asset_id).toBe("gif-001");
    const yellows = store.overlays().filter((o) => o.color === "yellow");
    expect(yellows).toHaveLength(1);
    expect(yellows[0]!.wordIndices).toEqual([19, 20, 21, 22, 23]);
  });
});
