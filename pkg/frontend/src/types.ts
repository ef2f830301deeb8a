// Wire types for the clipdeck HTTP API. Field names mirror the server JSON.

export type CardKind =
  | "TEXT_SNIPPET"
  | "IMAGE"
  | "REGION_CLIP"
  | "BOOKMARK"
  | "MANUAL"
  | "FOLDER";

export type ReprKind =
  | "SELECTION_TEXT"
  | "EXTRACTED_TEXT"
  | "HTML_FRAGMENT"
  | "REGION_IMAGE"
  | "PAGE_IMAGE"
  | "PAGE_ARCHIVE"
  | "RECOGNIZED_TEXT";

export interface ProjectDto {
  id: string;
  name: string;
  pinned: boolean;
  created_at: string;
  revision?: number;
  card_count?: number;
}

export interface RepresentationDto {
  repr_kind: ReprKind;
  asset: string | null;
  text: string | null;
}

export interface ProvenanceDto {
  source_url: string;
  page_title: string;
  favicon: string | null;
  captured_at: string;
}

export interface CardDto {
  id: string;
  parent_id: string | null;
  kind: CardKind;
  title: string;
  annotation: string;
  color: string | null;
  order_index: number;
  collapsed: boolean;
  representations: RepresentationDto[];
  provenance: ProvenanceDto | null;
  created_at: string;
  updated_at: string;
}

export interface CardSummaryDto {
  card_id: string;
  kind: CardKind;
  title: string;
  header_image: string | null;
  source_host: string;
  annotation_excerpt: string;
  child_count: number;
  collapsed: boolean;
  color: string | null;
}

export interface PreviewGridDto {
  squares_shown: number;
  overflow: number;
}

export interface OverviewEntryDto {
  card: CardSummaryDto;
  preview: PreviewGridDto;
  children: OverviewEntryDto[];
}

export interface OverviewDto {
  project_id: string;
  revision: number;
  overview: OverviewEntryDto[];
}

export interface ReaderEntryDto {
  depth: number;
  card: CardDto;
}

export interface ReaderDto {
  project_id: string;
  revision: number;
  entries: ReaderEntryDto[];
}

export interface PeekEntryDto {
  card_id: string;
  image: string | null;
  excerpt: string | null;
  title: string;
}

export interface PeekDto {
  card_id: string;
  entries: PeekEntryDto[];
}

export interface CaptureContextWire {
  url: string;
  title: string;
  favicon_b64?: string;
  viewport_b64?: string;
}

export interface BBoxWire {
  x: number;
  y: number;
  width: number;
  height: number;
}

export interface LayoutNodeWire {
  id: number;
  depth: number;
  rect: [number, number, number, number];
  markup: string;
  text: string;
}

export interface CaptureReply {
  card: CardDto;
  revision: number;
}

export interface MutationReply {
  revision: number;
  result: { card?: CardDto; project?: ProjectDto; removed?: string[] };
}

export interface ErrorBody {
  error: { code: string; message: string };
  current_revision?: number;
}
