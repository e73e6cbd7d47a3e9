export { ApiClient, ApiError, type FetchLike } from "./api.js";
export {
  clampResize,
  insertionOverlay,
  intersectingWordIndices,
  MAX_INSERTION_S,
  MIN_INSERTION_S,
  nextInsertionStart,
  recommendationOverlay,
  type Overlay,
} from "./overlay.js";
export { PreviewPlayer, type VisualFrame } from "./player.js";
export { EditorStore, type Toast } from "./store.js";
export { EditorView } from "./ui.js";
export * from "./types.js";

import { ApiClient } from "./api.js";
import { EditorStore } from "./store.js";
import { EditorView } from "./ui.js";

/** Wire a full editor into `root` against a running service. */
export async function mountEditor(
  root: HTMLElement,
  baseUrl: string,
  projectId: string,
): Promise<{ store: EditorStore; view: EditorView }> {
  const store = new EditorStore(new ApiClient(baseUrl));
  await store.open(projectId);
  const view = new EditorView(root, store);
  return { store, view };
}
