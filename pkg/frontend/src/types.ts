/**
 * Wire types for the cutaway project service. Field names match the JSON
 * documents exactly (snake_case); everything the UI knows about the backend
 * lives here.
 */

export interface TranscriptWord {
  text: string;
  start_s: number;
  end_s: number;
  pos: string | null;
}

export interface TranscriptDoc {
  video_id: string;
  duration_s: number;
  language: string;
  words: TranscriptWord[];
}

export interface AssetDoc {
  asset_id: string;
  provider: string;
  style: string;
  url: string;
  natural_duration_s: number;
  thumbnail_url: string;
  tags: string[];
}

export interface InsertionDoc {
  insertion_id: string;
  asset: AssetDoc;
  start_s: number;
  duration_s: number;
  origin: string;
}

export interface ProjectPayload {
  project_id: string;
  media_url: string;
  video_id: string;
  duration_s: number;
  revision: number;
  transcript: TranscriptDoc;
  insertions: InsertionDoc[];
  created_at: string;
  updated_at: string;
  query_count: number;
}

export interface RecommendationDoc {
  start_s: number;
  duration_s: number;
  query: string;
  source: string;
  score: number | null;
  anchor_word_index: number | null;
}

export interface SearchResults {
  social_media: AssetDoc[];
  professional: AssetDoc[];
}

export interface PlanSegmentDoc {
  source: string; // "aroll" or an asset_id
  source_in_s: number;
  source_out_s: number;
  timeline_in_s: number;
  timeline_out_s: number;
}

export interface PlaybackPlanDoc {
  video: PlanSegmentDoc[];
  audio: PlanSegmentDoc;
}

export interface InsertRequest {
  asset: AssetDoc;
  expected_revision: number;
  at_s?: number;
  word_index?: number;
  origin?: string;
}

export interface PatchInsertionRequest {
  expected_revision: number;
  start_s?: number;
  duration_s?: number;
}

export interface ErrorBody {
  code: string;
  message: string;
}
