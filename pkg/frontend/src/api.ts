import type {
  AssetDoc,
  InsertionDoc,
  InsertRequest,
  PatchInsertionRequest,
  PlaybackPlanDoc,
  ProjectPayload,
  RecommendationDoc,
  SearchResults,
  TranscriptDoc,
} from "./types.js";

/** Error responses are flat {code, message} objects with an HTTP status. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

type Query = Record<string, string | number | undefined>;

export class ApiClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    query?: Query,
  ): Promise<T> {
    let url = this.baseUrl + path;
    if (query) {
      const params = new URLSearchParams();
      for (const [key, value] of Object.entries(query)) {
        if (value !== undefined) params.set(key, String(value));
      }
      const qs = params.toString();
      if (qs) url += `?${qs}`;
    }
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchFn(url, init);
    const text = await res.text();
    let payload: unknown = null;
    if (text) {
      try {
        payload = JSON.parse(text);
      } catch {
        payload = null;
      }
    }
    if (!res.ok) {
      const doc = (payload ?? {}) as Partial<{ code: string; message: string }>;
      throw new ApiError(
        res.status,
        doc.code ?? "error",
        doc.message ?? `request failed with status ${res.status}`,
      );
    }
    return payload as T;
  }

  createProject(
    transcript: TranscriptDoc,
    mediaUrl = "",
  ): Promise<ProjectPayload> {
    return this.request("POST", "/projects", {
      transcript,
      media_url: mediaUrl,
    });
  }

  getProject(projectId: string): Promise<ProjectPayload> {
    return this.request("GET", `/projects/${projectId}`);
  }

  insert(
    projectId: string,
    req: InsertRequest,
  ): Promise<{ insertion_id: string; revision: number }> {
    return this.request("POST", `/projects/${projectId}/insertions`, req);
  }

  patchInsertion(
    projectId: string,
    insertionId: string,
    req: PatchInsertionRequest,
  ): Promise<{ insertion: InsertionDoc; revision: number }> {
    return this.request(
      "PATCH",
      `/projects/${projectId}/insertions/${insertionId}`,
      req,
    );
  }

  deleteInsertion(
    projectId: string,
    insertionId: string,
    expectedRevision: number,
  ): Promise<{ revision: number }> {
    return this.request(
      "DELETE",
      `/projects/${projectId}/insertions/${insertionId}`,
      undefined,
      { expected_revision: expectedRevision },
    );
  }

  recommendations(
    projectId: string,
    source: string,
    limit?: number,
  ): Promise<{ source: string; items: RecommendationDoc[] }> {
    return this.request(
      "GET",
      `/projects/${projectId}/recommendations`,
      undefined,
      { source, limit },
    );
  }

  search(
    projectId: string,
    q: string,
    style = "both",
    limit?: number,
  ): Promise<{ query: string; results: SearchResults }> {
    return this.request("GET", `/projects/${projectId}/search`, undefined, {
      q,
      style,
      limit,
    });
  }

  plan(projectId: string): Promise<PlaybackPlanDoc> {
    return this.request("GET", `/projects/${projectId}/plan`);
  }
}

export type { AssetDoc };
